#pragma once

#include "lawson/asymptotics.hpp"
#include "lawson/certify.hpp"
#include "lawson/core.hpp"
#include "lawson/foliation.hpp"
#include "lawson/fourier.hpp"
#include "lawson/integrand.hpp"
#include "lawson/io.hpp"
#include "lawson/ode.hpp"
#include "lawson/profile.hpp"
