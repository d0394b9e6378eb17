#pragma once

#include "ubo/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <string>

namespace ubo {

// A benchmark objective on the normalized domain [0,1]^d, maximized.
struct Problem {
  std::string name;
  int dim = 1;
  std::function<double(VecRef)> eval;
  double input_sigma = 0.02;
  int init_samples = 5;
  int budget = 40;
};

// 1D sum of squared-exponential bumps: a broad safe optimum near 0.27 and a
// taller narrow spike near 0.885 that collapses under input noise.
double rkhs_eval(double x);

// 2D Gaussian mixture whose noiseless argmax (narrow mode) differs from the
// sigma=0.02 integrated argmax (broad mode).
double gm_eval(VecRef x);
Vector gm_narrow_center();
Vector gm_broad_center();

// Negated-convention Michalewicz (m = 10) on [0,1]^4, mapped to [0,pi]^4,
// maximized; value 0 at the origin.
double michalewicz4_eval(VecRef x);

// Rover path-planning world: uniform cubic Bezier from start to goal through
// two free control points, integrated terrain cost over a polyline.
struct RoverWorld {
  struct Rect {
    double x0, y0, x1, y1;
    bool contains(double x, double y) const {
      return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
  };
  std::vector<Rect> obstacles;
  std::vector<Rect> slopes;
  Vector start, goal;
  double slope_factor = 4.0;
  double obstacle_penalty = 50.0;

  static RoverWorld standard();
  nlohmann::json to_json() const;
};

// Negated path cost (maximized). params in [0,1]^4 decode the two interior
// control points.
double rover_cost(VecRef params, const RoverWorld& world, int segments = 200);

// Input-noise wrapper: evaluates at x + eps, eps ~ N(0, sigma^2 I), clamped
// to the domain.
double noisy_query(const Problem& problem, VecRef x, Rng& rng);

// Registry: rkhs, gm2d, michalewicz4, rover.
Problem make_problem(const std::string& name);
std::vector<std::string> problem_names();

}  // namespace ubo
