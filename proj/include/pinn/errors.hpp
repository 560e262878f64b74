#ifndef PINN_ERRORS_HPP
#define PINN_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pinn {

// Training produced a non-finite loss, gradient, or parameter update.
class DivergedError : public std::runtime_error {
 public:
  explicit DivergedError(const std::string& what, std::uint64_t iteration = 0)
      : std::runtime_error(what), iteration_(iteration) {}

  std::uint64_t iteration() const noexcept { return iteration_; }

 private:
  std::uint64_t iteration_;
};

}  // namespace pinn

#endif
