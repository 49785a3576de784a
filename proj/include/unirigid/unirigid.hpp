#pragma once

#include "unirigid/errors.hpp"
#include "unirigid/numerics.hpp"
#include "unirigid/framework.hpp"
#include "unirigid/min_eig_opt.hpp"
#include "unirigid/stress.hpp"
#include "unirigid/spectra.hpp"
#include "unirigid/certify.hpp"
#include "unirigid/oracle.hpp"
#include "unirigid/io.hpp"
#include "unirigid/report.hpp"
