#pragma once

#include "akc/kernels.hpp"

#include <boost/multiprecision/complex128.hpp>

namespace akc {

using Quad = boost::multiprecision::float128;
using QComplex = boost::multiprecision::complex128;

namespace kern {
template <>
struct RealOf<QComplex> {
    using type = Quad;
};
}  // namespace kern

}  // namespace akc
