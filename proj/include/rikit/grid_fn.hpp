#pragma once

// Discretization of (0,1): monotone grids and the piecewise-constant
// function carrier shared by every other module.

#include <Eigen/Core>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace rikit {

enum class GridScheme { geometric_toward_zero, geometric_toward_both_ends, uniform };

const char* to_string(GridScheme scheme) noexcept;
GridScheme grid_scheme_from_string(const std::string& name);

/// Partition 0 = x_0 < x_1 < ... < x_N = 1 of the unit interval.
///
/// Cell i (zero based) is the half-open interval [x_i, x_{i+1}). Only the
/// right endpoints are stored; the left endpoint 0 is implicit. Copies share
/// the immutable breakpoint storage.
class Grid {
 public:
  static Grid from_breakpoints(Eigen::ArrayXd breakpoints, GridScheme scheme);

  Eigen::Index size() const { return data_->breakpoints.size(); }
  GridScheme scheme() const { return data_->scheme; }
  const Eigen::ArrayXd& breakpoints() const { return data_->breakpoints; }

  double left(Eigen::Index cell) const { return cell == 0 ? 0.0 : data_->breakpoints[cell - 1]; }
  double right(Eigen::Index cell) const { return data_->breakpoints[cell]; }
  double width(Eigen::Index cell) const { return right(cell) - left(cell); }

  /// Sample point of a cell: the left endpoint, except for the first cell
  /// whose left endpoint 0 is replaced by half the first breakpoint.
  double representative(Eigen::Index cell) const {
    return cell == 0 ? 0.5 * data_->breakpoints[0] : data_->breakpoints[cell - 1];
  }
  Eigen::ArrayXd representatives() const;
  Eigen::ArrayXd widths() const;

  /// Index of the cell containing t; t = 1 belongs to the last cell.
  Eigen::Index locate(double t) const;

  /// Identity of the shared storage; equal ids mean the same grid object.
  const void* id() const { return data_.get(); }
  bool same_as(const Grid& other) const { return data_ == other.data_; }

  /// Per-grid memo for derived tables (cell weight integrals, pulled-back
  /// grids). The factory runs at most once per key.
  template <class T, class Factory>
  std::shared_ptr<const T> memo(const std::string& key, Factory&& make) const {
    std::lock_guard<std::mutex> lock(data_->memo_mutex);
    auto it = data_->memo.find(key);
    if (it != data_->memo.end()) return std::static_pointer_cast<const T>(it->second);
    auto value = std::make_shared<const T>(make());
    data_->memo.emplace(key, value);
    return value;
  }

 private:
  struct Data {
    Eigen::ArrayXd breakpoints;
    GridScheme scheme;
    std::mutex memo_mutex;
    std::map<std::string, std::shared_ptr<const void>> memo;
  };
  std::shared_ptr<Data> data_;
};

/// Builds a grid of `size` cells. Geometric schemes put the first breakpoint
/// at `min_cell` (and, for both ends, the last cell also has width
/// `min_cell`) with a constant ratio of consecutive widths.
Grid make_grid(Eigen::Index size, GridScheme scheme, double min_cell);

/// Sorted union of breakpoints; points closer than a few ulps are merged.
Grid common_refinement(const Grid& a, const Grid& b);

enum class Monotone { unknown, nonincreasing };

/// Piecewise-constant function: one finite value per cell.
class StepFunction {
 public:
  StepFunction(Grid grid, Eigen::ArrayXd values, Monotone flag = Monotone::unknown);

  static StepFunction constant(const Grid& grid, double c);
  /// Samples `fn` at the cell representatives.
  static StepFunction sample(const Grid& grid, const std::function<double(double)>& fn);
  /// chi_(0,a) sampled at representatives.
  static StepFunction indicator(const Grid& grid, double a);

  const Grid& grid() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }
  double value(Eigen::Index cell) const { return values_[cell]; }
  Eigen::Index size() const { return values_.size(); }
  Monotone monotone() const { return monotone_; }

  /// Value of the cell containing t.
  double operator()(double t) const { return values_[grid_.locate(t)]; }

  /// Values re-expressed on a refinement of this function's grid.
  StepFunction on_grid(const Grid& finer) const;

  StepFunction abs() const;
  /// |f|^q cellwise; keeps the nonincreasing flag for q > 0.
  StepFunction abs_pow(double q) const;
  StepFunction scaled(double c) const;

  bool values_nonincreasing() const;

 private:
  Grid grid_;
  Eigen::ArrayXd values_;
  Monotone monotone_;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
};

/// Exact integral of a step function over [a, b].
QuadratureResult integrate(const StepFunction& f, double a, double b);

/// Exact integral of f*g for step functions living on different grids.
double integrate_product(const StepFunction& f, const StepFunction& g);

/// Cellwise maximum / sum on the common refinement.
StepFunction pointwise_max(const StepFunction& f, const StepFunction& g);
StepFunction pointwise_sum(const StepFunction& f, const StepFunction& g);

struct MonotoneMap {
  std::function<double(double)> fn;
  bool nondecreasing = true;
};

/// t -> f(phi(t)) sampled at the representatives of f's grid.
StepFunction compose_with_monotone(const StepFunction& f, const MonotoneMap& phi);

}  // namespace rikit
