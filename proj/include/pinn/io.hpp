#ifndef PINN_IO_HPP
#define PINN_IO_HPP

#include <string>

namespace pinn::io {

// Shortest round-trip decimal form of a double ('.' decimal point,
// locale-independent); identical inputs always format identically, which is
// what keeps CSV outputs byte-reproducible.
std::string format_double(double v);

}  // namespace pinn::io

#endif
