#include "ubo/neldermead.hpp"

#include <algorithm>
#include <numeric>

namespace ubo {

std::pair<Vector, double> nelder_mead_max(const std::function<double(VecRef)>& fn,
                                          VecRef x0, int max_evals, double initial_step) {
  const int d = static_cast<int>(x0.size());
  int evals = 0;
  Vector best_x = clamp_unit(x0);
  double best_f = -std::numeric_limits<double>::infinity();

  auto eval = [&](VecRef x) {
    const Vector xc = clamp_unit(x);
    const double f = fn(xc);
    ++evals;
    if (f > best_f) {
      best_f = f;
      best_x = xc;
    }
    return f;
  };

  std::vector<Vector> simplex(d + 1);
  std::vector<double> fvals(d + 1);
  simplex[0] = clamp_unit(x0);
  fvals[0] = eval(simplex[0]);
  for (int i = 0; i < d; ++i) {
    Vector v = simplex[0];
    v(i) += (v(i) + initial_step <= 1.0) ? initial_step : -initial_step;
    simplex[i + 1] = v;
    fvals[i + 1] = eval(v);
  }

  std::vector<int> order(d + 1);
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    // Descending: order[0] is the best vertex (maximization).
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fvals[a] > fvals[b]; });
    const int hi = order[d], second = order[d - 1], lo = order[0];

    Vector centroid = Vector::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != hi) centroid += simplex[i];
    centroid /= d;

    const Vector refl = centroid + (centroid - simplex[hi]);
    const double f_refl = eval(refl);
    if (f_refl > fvals[lo]) {
      const Vector expd = centroid + 2.0 * (centroid - simplex[hi]);
      const double f_expd = eval(expd);
      if (f_expd > f_refl) {
        simplex[hi] = expd;
        fvals[hi] = f_expd;
      } else {
        simplex[hi] = refl;
        fvals[hi] = f_refl;
      }
    } else if (f_refl > fvals[second]) {
      simplex[hi] = refl;
      fvals[hi] = f_refl;
    } else {
      const Vector contr = centroid + 0.5 * (simplex[hi] - centroid);
      const double f_contr = eval(contr);
      if (f_contr > fvals[hi]) {
        simplex[hi] = contr;
        fvals[hi] = f_contr;
      } else {
        for (int i = 0; i <= d; ++i) {
          if (i == lo) continue;
          simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
          fvals[i] = eval(simplex[i]);
          if (evals >= max_evals) break;
        }
      }
    }
  }
  return {best_x, best_f};
}

}  // namespace ubo
