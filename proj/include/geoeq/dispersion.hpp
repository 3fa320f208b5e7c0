#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "geoeq/errors.hpp"

namespace geoeq {

/// Logit heterogeneity: t(x) = -mu ln(1 - x). mu = 0 is the zero penalty.
struct LogitPenalty {
  double mu;
};

/// t(x) = mu x.
struct LinearPenalty {
  double mu;
};

/// User-supplied penalty; both t and t' are required.
struct CustomPenalty {
  std::function<double(double)> t;
  std::function<double(double)> t_prime;
  std::string name = "custom";
};

/// Location penalty t(x) paid by consumer x for living in L (t(1 - x) for R).
class PenaltySpec {
 public:
  using Kind = std::variant<LogitPenalty, LinearPenalty, CustomPenalty>;

  static PenaltySpec logit(double mu) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
      throw DomainError("logit heterogeneity mu must be >= 0");
    }
    return PenaltySpec(LogitPenalty{mu});
  }

  static PenaltySpec linear(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("linear slope mu must be > 0");
    return PenaltySpec(LinearPenalty{mu});
  }

  /// Rejects t' <= 0 on a 65-point sample of [0,1].
  static PenaltySpec custom(std::function<double(double)> t,
                            std::function<double(double)> t_prime,
                            std::string name = "custom") {
    if (!t || !t_prime) throw DomainError("custom penalty needs both t and t'");
    for (int i = 0; i <= 64; ++i) {
      const double x = i / 64.0;
      if (!(t_prime(x) > 0.0)) {
        throw DomainError("custom penalty slope must be positive, t'(" +
                          std::to_string(x) + ") <= 0");
      }
    }
    return PenaltySpec(CustomPenalty{std::move(t), std::move(t_prime), std::move(name)});
  }

  const Kind& kind() const { return kind_; }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, LogitPenalty>) return "logit";
          else if constexpr (std::is_same_v<K, LinearPenalty>) return "linear";
          else return k.name;
        },
        kind_);
  }

  /// Heterogeneity / slope parameter, absent for custom penalties.
  std::optional<double> mu() const {
    if (const auto* l = std::get_if<LogitPenalty>(&kind_)) return l->mu;
    if (const auto* l = std::get_if<LinearPenalty>(&kind_)) return l->mu;
    return std::nullopt;
  }

  /// Same family with a different mu; throws for custom penalties.
  PenaltySpec with_mu(double mu) const {
    if (std::holds_alternative<LogitPenalty>(kind_)) return logit(mu);
    if (std::holds_alternative<LinearPenalty>(kind_)) return linear(mu);
    throw DomainError("custom penalties have no mu parameter");
  }

  /// True when t(1) is unbounded, so h in {0,1} can never be an equilibrium.
  bool diverges_at_endpoints() const {
    const auto* l = std::get_if<LogitPenalty>(&kind_);
    return l != nullptr && l->mu > 0.0;
  }

 private:
  explicit PenaltySpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

namespace detail {

inline void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(x));
  }
}

}  // namespace detail

inline double penalty(double x, const PenaltySpec& spec) {
  detail::check_unit(x, "penalty argument");
  return std::visit(
      [x](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LogitPenalty>) {
          if (k.mu == 0.0) return 0.0;
          if (x == 1.0) throw DomainError("logit penalty is unbounded at x = 1");
          return -k.mu * std::log1p(-x);
        } else if constexpr (std::is_same_v<K, LinearPenalty>) {
          return k.mu * x;
        } else {
          return k.t(x);
        }
      },
      spec.kind());
}

/// t'(x).
inline double penalty_slope(double x, const PenaltySpec& spec) {
  detail::check_unit(x, "penalty argument");
  return std::visit(
      [x](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LogitPenalty>) {
          if (k.mu == 0.0) return 0.0;
          if (x == 1.0) return std::numeric_limits<double>::infinity();
          return k.mu / (1.0 - x);
        } else if constexpr (std::is_same_v<K, LinearPenalty>) {
          return k.mu;
        } else {
          return k.t_prime(x);
        }
      },
      spec.kind());
}

/// t'''(x) where known analytically; custom penalties report nothing.
inline std::optional<double> penalty_third(double x, const PenaltySpec& spec) {
  if (const auto* l = std::get_if<LogitPenalty>(&spec.kind())) {
    const double r = 1.0 - x;
    return 2.0 * l->mu / (r * r * r);
  }
  if (std::holds_alternative<LinearPenalty>(spec.kind())) return 0.0;
  return std::nullopt;
}

/// Penalty differential t(h) - t(1 - h). Signed infinity at logit endpoints.
inline double delta_t(double h, const PenaltySpec& spec) {
  detail::check_unit(h, "share");
  return std::visit(
      [h](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LogitPenalty>) {
          if (k.mu == 0.0) return 0.0;
          return k.mu * (std::log(h) - std::log(1.0 - h));
        } else if constexpr (std::is_same_v<K, LinearPenalty>) {
          return k.mu * (2.0 * h - 1.0);
        } else {
          return k.t(h) - k.t(1.0 - h);
        }
      },
      spec.kind());
}

/// d/dh of the penalty differential, t'(h) + t'(1 - h).
inline double delta_t_prime(double h, const PenaltySpec& spec) {
  detail::check_unit(h, "share");
  return std::visit(
      [h](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LogitPenalty>) {
          if (k.mu == 0.0) return 0.0;
          if (h == 0.0 || h == 1.0) return std::numeric_limits<double>::infinity();
          return k.mu / (h * (1.0 - h));
        } else if constexpr (std::is_same_v<K, LinearPenalty>) {
          return 2.0 * k.mu;
        } else {
          return k.t_prime(h) + k.t_prime(1.0 - h);
        }
      },
      spec.kind());
}

/// Share choosing L when utilities differ by `du` and idiosyncratic tastes are
/// Gumbel with scale mu: e^{u_L/mu} / (e^{u_L/mu} + e^{u_R/mu}).
inline double logit_choice_share(double du, double mu) {
  if (!(mu > 0.0)) throw DomainError("logit choice needs mu > 0");
  return 1.0 / (1.0 + std::exp(-du / mu));
}

}  // namespace geoeq
