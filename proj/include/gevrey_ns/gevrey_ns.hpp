#ifndef GEVREY_NS_GEVREY_NS_HPP
#define GEVREY_NS_GEVREY_NS_HPP

#include "gevrey_ns/derivative_engine.hpp"
#include "gevrey_ns/errors.hpp"
#include "gevrey_ns/gevrey_functionals.hpp"
#include "gevrey_ns/ladyzhenskaya.hpp"
#include "gevrey_ns/ns_solver.hpp"
#include "gevrey_ns/run_config.hpp"
#include "gevrey_ns/special_functions.hpp"
#include "gevrey_ns/spectral_core.hpp"
#include "gevrey_ns/stokes_semigroup.hpp"
#include "gevrey_ns/verifier.hpp"

#endif
