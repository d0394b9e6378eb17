#include "ubo/problems.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace ubo {

namespace {

double se_bump(double x, double center, double width) {
  const double z = (x - center) / width;
  return std::exp(-0.5 * z * z);
}

struct RkhsTerm {
  double amplitude, center, width;
};

// Broad structure around 0.27, narrow spike at 0.885.
constexpr RkhsTerm kRkhsTerms[] = {
    {2.5, 0.27, 0.10},
    {1.0, 0.12, 0.05},
    {0.7, 0.45, 0.06},
    {1.2, 0.65, 0.18},
    {3.2, 0.885, 0.015},
    {0.4, 0.95, 0.04},
};

struct GmComponent {
  double weight;
  double mx, my;
  double sigma;
};

// Narrow spike + pedestal at (0.3125, 0.1875); broad mode at
// (0.8125, 0.6875). Weights chosen so the noiseless peak (21.5) is at the
// narrow mode while the sigma = 0.02 integrated peak (15.75 vs 11.66) is at
// the broad mode.
constexpr GmComponent kGmComponents[] = {
    {0.049009, 0.3125, 0.1875, 0.02},
    {0.101788, 0.3125, 0.1875, 0.09},
    {2.573594, 0.8125, 0.6875, 0.16},
};

double gaussian2(double dx, double dy, double sigma) {
  const double s2 = sigma * sigma;
  return std::exp(-0.5 * (dx * dx + dy * dy) / s2) / (2.0 * M_PI * s2);
}

Vector bezier_point(const Vector& p0, const Vector& p1, const Vector& p2, const Vector& p3,
                    double t) {
  const double u = 1.0 - t;
  return u * u * u * p0 + 3.0 * u * u * t * p1 + 3.0 * u * t * t * p2 + t * t * t * p3;
}

double terrain_rate(const RoverWorld& world, double x, double y) {
  for (const auto& r : world.obstacles)
    if (r.contains(x, y)) return world.obstacle_penalty;
  for (const auto& r : world.slopes)
    if (r.contains(x, y)) return world.slope_factor;
  return 1.0;
}

}  // namespace

double rkhs_eval(double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("rkhs_eval: x outside [0,1]");
  double f = 0.0;
  for (const auto& t : kRkhsTerms) f += t.amplitude * se_bump(x, t.center, t.width);
  return f;
}

double gm_eval(VecRef x) {
  if (x.size() != 2) throw std::invalid_argument("gm_eval: expects a 2-vector");
  double f = 0.0;
  for (const auto& c : kGmComponents)
    f += c.weight * gaussian2(x(0) - c.mx, x(1) - c.my, c.sigma);
  return f;
}

Vector gm_narrow_center() { return Eigen::Vector2d(0.3125, 0.1875); }
Vector gm_broad_center() { return Eigen::Vector2d(0.8125, 0.6875); }

double michalewicz4_eval(VecRef x) {
  if (x.size() != 4) throw std::invalid_argument("michalewicz4_eval: expects a 4-vector");
  double f = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double z = M_PI * x(i);
    const double s = std::sin(static_cast<double>(i + 1) * z * z / M_PI);
    f += std::sin(z) * std::pow(s * s, 10.0);
  }
  return f;
}

RoverWorld RoverWorld::standard() {
  RoverWorld w;
  w.start = Eigen::Vector2d(0.05, 0.05);
  w.goal = Eigen::Vector2d(0.95, 0.95);
  // Vertical wall split by a very narrow central gap; threading it is the
  // shortest route but fragile under control noise. The safe detour runs
  // south of the wall across a slope band that reaches the floor, so the
  // southern basin is broad and forgiving.
  w.obstacles.push_back({0.40, 0.18, 0.60, 0.49});
  w.obstacles.push_back({0.40, 0.51, 0.60, 1.0});
  // Pebble in the middle of the southern channel: the shortest southern
  // route grazes it (fragile), the robust route detours just below.
  w.obstacles.push_back({0.47, 0.08, 0.53, 0.12});
  w.slopes.push_back({0.40, 0.0, 0.60, 0.18});
  return w;
}

nlohmann::json RoverWorld::to_json() const {
  auto rects = [](const std::vector<Rect>& rs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rs) arr.push_back({r.x0, r.y0, r.x1, r.y1});
    return arr;
  };
  return {{"start", {start(0), start(1)}},
          {"goal", {goal(0), goal(1)}},
          {"obstacles", rects(obstacles)},
          {"slopes", rects(slopes)},
          {"slope_factor", slope_factor},
          {"obstacle_penalty", obstacle_penalty}};
}

double rover_cost(VecRef params, const RoverWorld& world, int segments) {
  if (params.size() != 4) throw std::invalid_argument("rover_cost: expects a 4-vector");
  const Vector p1 = params.head(2);
  const Vector p2 = params.tail(2);
  double cost = 0.0;
  Vector prev = world.start;
  for (int i = 1; i <= segments; ++i) {
    const double t = static_cast<double>(i) / segments;
    const Vector cur = bezier_point(world.start, p1, p2, world.goal, t);
    const Vector mid = 0.5 * (prev + cur);
    cost += terrain_rate(world, mid(0), mid(1)) * (cur - prev).norm();
    prev = cur;
  }
  return -cost;
}

double noisy_query(const Problem& problem, VecRef x, Rng& rng) {
  if (problem.input_sigma <= 0.0) return problem.eval(x);
  std::normal_distribution<double> noise(0.0, problem.input_sigma);
  Vector xp = x;
  for (Eigen::Index i = 0; i < xp.size(); ++i) xp(i) += noise(rng);
  return problem.eval(clamp_unit(xp));
}

Problem make_problem(const std::string& name) {
  if (name == "rkhs")
    return {"rkhs", 1, [](VecRef x) { return rkhs_eval(x(0)); }, 0.02, 5, 40};
  if (name == "gm2d") return {"gm2d", 2, [](VecRef x) { return gm_eval(x); }, 0.02, 20, 40};
  if (name == "michalewicz4")
    return {"michalewicz4", 4, [](VecRef x) { return michalewicz4_eval(x); }, 0.02, 30, 40};
  if (name == "rover") {
    auto world = RoverWorld::standard();
    return {"rover", 4, [world](VecRef x) { return rover_cost(x, world); }, 0.02, 30, 40};
  }
  throw std::invalid_argument("make_problem: unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() { return {"rkhs", "gm2d", "michalewicz4", "rover"}; }

}  // namespace ubo
