#ifndef CITEFIT_KAHAN_HPP
#define CITEFIT_KAHAN_HPP

namespace citefit {

// Compensated accumulator; add() absorbs one rounding error per term.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace citefit

#endif
