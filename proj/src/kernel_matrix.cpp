#include "sgntk/kernel_matrix.hpp"

#include <algorithm>
#include <ostream>

#include "sgntk/errors.hpp"
#include "sgntk/format.hpp"

namespace sgntk {

bool KernelMatrix::any_divergent() const noexcept {
  return std::any_of(divergent.begin(), divergent.end(), [](unsigned char f) { return f != 0; });
}

bool KernelMatrix::is_divergent(std::size_t r, std::size_t c) const noexcept {
  return !divergent.empty() && divergent[r * values.cols() + c] != 0;
}

void KernelMatrix::mark_divergent(std::size_t r, std::size_t c, double rate) {
  if (divergent.empty()) divergent.assign(values.size(), 0);
  divergent[r * values.cols() + c] = 1;
  values(r, c) = rate;
}

const Matrix& KernelMatrix::finite() const {
  if (any_divergent()) raise(Errc::DivergentKernel, "kernel matrix has divergent entries");
  return values;
}

void write_gram_csv(const KernelMatrix& k, std::ostream& out) {
  out << "point";
  for (std::size_t c = 0; c < k.cols(); ++c) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < k.rows(); ++r) {
    out << r;
    for (std::size_t c = 0; c < k.cols(); ++c) {
      out << ',' << (k.is_divergent(r, c) ? std::string("DIV") : format_real(k.values(r, c)));
    }
    out << '\n';
  }
}

}  // namespace sgntk
