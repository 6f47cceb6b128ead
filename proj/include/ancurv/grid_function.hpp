// SPDX-License-Identifier: Apache-2.0
//
// GridFunction: a scalar function sampled on a uniform grid, carrying a
// value and a first-derivative channel. Off-node evaluation uses the
// cubic Hermite interpolant of the enclosing interval (order 3).
//
// CSV layout is "t,value,deriv" with 17 significant digits, which
// round-trips IEEE doubles bit-exactly.
#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ancurv {

class GridFunction {
  public:
    static constexpr int interp_order = 3;

    GridFunction() = default;

    GridFunction(double t0, double dt, std::vector<double> values, std::vector<double> derivs)
        : t0_(t0), dt_(dt), values_(std::move(values)), derivs_(std::move(derivs)) {
        if (values_.size() != derivs_.size())
            throw std::invalid_argument("GridFunction: value/deriv length mismatch");
        if (values_.size() < 2) throw std::invalid_argument("GridFunction: need at least 2 nodes");
        if (!(dt_ > 0.0)) throw std::invalid_argument("GridFunction: step must be positive");
    }

    template <class F, class DF>
    static GridFunction sample(F&& f, DF&& df, double t0, double t1, std::size_t n_nodes) {
        if (n_nodes < 2) throw std::invalid_argument("GridFunction::sample: need >= 2 nodes");
        const double dt = (t1 - t0) / static_cast<double>(n_nodes - 1);
        std::vector<double> v(n_nodes), d(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const double t = t0 + static_cast<double>(i) * dt;
            v[i] = f(t);
            d[i] = df(t);
        }
        return GridFunction(t0, dt, std::move(v), std::move(d));
    }

    std::size_t size() const { return values_.size(); }
    double t0() const { return t0_; }
    double dt() const { return dt_; }
    double t_back() const { return node(size() - 1); }
    double node(std::size_t i) const { return t0_ + static_cast<double>(i) * dt_; }
    double value(std::size_t i) const { return values_[i]; }
    double deriv(std::size_t i) const { return derivs_[i]; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& derivs() const { return derivs_; }

    // Hermite evaluation; t clamped to the grid range is a caller error.
    double operator()(double t) const {
        const auto [i, s] = locate(t);
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        return h00 * values_[i] + h10 * dt_ * derivs_[i] + h01 * values_[i + 1] +
               h11 * dt_ * derivs_[i + 1];
    }

    double derivative(double t) const {
        const auto [i, s] = locate(t);
        const double g00 = 6.0 * s * (s - 1.0);
        const double g10 = (1.0 - s) * (1.0 - 3.0 * s);
        const double g01 = -g00;
        const double g11 = s * (3.0 * s - 2.0);
        return g00 * values_[i] / dt_ + g10 * derivs_[i] + g01 * values_[i + 1] / dt_ +
               g11 * derivs_[i + 1];
    }

    // Cumulative integral at every node via the derivative-corrected
    // trapezoid rule (exact for the Hermite interpolant, O(dt^4) global).
    std::vector<double> cumulative_integral() const {
        std::vector<double> acc(size(), 0.0);
        const double c2 = dt_ * dt_ / 12.0;
        for (std::size_t i = 0; i + 1 < size(); ++i) {
            acc[i + 1] = acc[i] + 0.5 * dt_ * (values_[i] + values_[i + 1]) +
                         c2 * (derivs_[i] - derivs_[i + 1]);
        }
        return acc;
    }

    void write_csv(std::ostream& os) const {
        os << "t,value,deriv\n";
        char buf[128];
        for (std::size_t i = 0; i < size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", node(i), values_[i],
                          derivs_[i]);
            os << buf;
        }
    }

    static GridFunction read_csv(std::istream& is) {
        std::string line;
        if (!std::getline(is, line) || line.rfind("t,value,deriv", 0) != 0)
            throw std::runtime_error("GridFunction: bad CSV header");
        std::vector<double> t, v, d;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            double a, b, c;
            if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &a, &b, &c) != 3)
                throw std::runtime_error("GridFunction: bad CSV row: " + line);
            t.push_back(a);
            v.push_back(b);
            d.push_back(c);
        }
        if (t.size() < 2) throw std::runtime_error("GridFunction: CSV has fewer than 2 rows");
        const double t0 = t.front();
        const double dt = (t.back() - t0) / static_cast<double>(t.size() - 1);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double expect = t0 + static_cast<double>(i) * dt;
            if (std::abs(t[i] - expect) > 1e-14 * std::max(1.0, std::abs(expect)))
                throw std::runtime_error("GridFunction: CSV grid is not uniform");
        }
        return GridFunction(t0, dt, std::move(v), std::move(d));
    }

  private:
    std::pair<std::size_t, double> locate(double t) const {
        if (t < t0_ - 1e-12 * std::max(1.0, std::abs(t0_)) || t > t_back() + 1e-12 * std::max(1.0, t_back()))
            throw std::domain_error("GridFunction: evaluation outside grid");
        double x = (t - t0_) / dt_;
        auto i = static_cast<std::size_t>(std::max(0.0, std::floor(x)));
        if (i >= size() - 1) i = size() - 2;
        return {i, x - static_cast<double>(i)};
    }

    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

}  // namespace ancurv
