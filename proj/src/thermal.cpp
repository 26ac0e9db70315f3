#include "txlife/thermal.hpp"

#include <cmath>
#include <string>

#include "txlife/errors.hpp"

namespace txlife::thermal {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidInputError(std::string(name) + " must be finite and > 0, got " +
                                std::to_string(value));
    }
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw InvalidInputError(std::string(name) + " must be finite");
    }
}

}  // namespace

void validate(const TransformerParams& params, bool standard_exponent_range) {
    require_positive(params.delta_theta_to_rated, "delta_theta_to_rated");
    require_positive(params.delta_theta_h_rated, "delta_theta_h_rated");
    require_positive(params.loss_ratio_r, "loss_ratio_r");
    require_positive(params.exp_n, "exp_n");
    require_positive(params.exp_m, "exp_m");
    require_positive(params.tau_to, "tau_to");
    require_positive(params.tau_w, "tau_w");
    require_positive(params.life_const_a, "life_const_a");
    require_positive(params.life_const_b, "life_const_b");
    require_positive(params.ref_hotspot_kelvin, "ref_hotspot_kelvin");
    require_positive(params.aging_rate_kelvin, "aging_rate_kelvin");
    require_positive(params.normal_insulation_life, "normal_insulation_life");
    if (standard_exponent_range) {
        if (params.exp_n > 1.0) {
            throw InvalidInputError("exp_n must lie in (0, 1], got " +
                                    std::to_string(params.exp_n));
        }
        if (params.exp_m > 1.0) {
            throw InvalidInputError("exp_m must lie in (0, 1], got " +
                                    std::to_string(params.exp_m));
        }
    }
}

double aging_acceleration_factor(double theta_h_c, const TransformerParams& params) {
    require_finite(theta_h_c, "theta_h_c");
    const double kelvin = theta_h_c + 273.0;
    if (!(kelvin > 0.0)) {
        throw InvalidInputError("theta_h_c must exceed absolute zero, got " +
                                std::to_string(theta_h_c));
    }
    return std::exp(params.aging_rate_kelvin / params.ref_hotspot_kelvin -
                    params.aging_rate_kelvin / kelvin);
}

double per_unit_life(double theta_h_c, const TransformerParams& params) {
    require_finite(theta_h_c, "theta_h_c");
    const double kelvin = theta_h_c + 273.0;
    if (!(kelvin > 0.0)) {
        throw InvalidInputError("theta_h_c must exceed absolute zero, got " +
                                std::to_string(theta_h_c));
    }
    return params.life_const_a * std::exp(params.life_const_b / kelvin);
}

double equivalent_aging_factor(std::span<const double> faa_series,
                               std::span<const double> dt_hours) {
    if (faa_series.empty()) {
        throw EmptyInputError("equivalent_aging_factor needs at least one interval");
    }
    if (faa_series.size() != dt_hours.size()) {
        throw ShapeError("faa_series has " + std::to_string(faa_series.size()) +
                         " entries but dt_hours has " + std::to_string(dt_hours.size()));
    }
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < faa_series.size(); ++i) {
        if (!std::isfinite(faa_series[i]) || faa_series[i] < 0.0) {
            throw InvalidInputError("faa_series[" + std::to_string(i) +
                                    "] must be finite and >= 0");
        }
        if (!std::isfinite(dt_hours[i]) || !(dt_hours[i] > 0.0)) {
            throw InvalidInputError("dt_hours[" + std::to_string(i) +
                                    "] must be finite and > 0");
        }
        weighted += faa_series[i] * dt_hours[i];
        total += dt_hours[i];
    }
    return weighted / total;
}

double percent_loss_of_life(double feqa, double elapsed_hours,
                            const TransformerParams& params) {
    if (!std::isfinite(feqa) || feqa < 0.0) {
        throw InvalidInputError("feqa must be finite and >= 0");
    }
    if (!std::isfinite(elapsed_hours) || elapsed_hours < 0.0) {
        throw InvalidInputError("elapsed_hours must be finite and >= 0");
    }
    return feqa * elapsed_hours * 100.0 / params.normal_insulation_life;
}

double ultimate_top_oil_rise(double load_pu, const TransformerParams& params) {
    if (!std::isfinite(load_pu) || load_pu < 0.0) {
        throw InvalidInputError("load_pu must be finite and >= 0, got " +
                                std::to_string(load_pu));
    }
    const double k2 = load_pu * load_pu;
    const double ratio = (k2 * params.loss_ratio_r + 1.0) / (params.loss_ratio_r + 1.0);
    return params.delta_theta_to_rated * std::pow(ratio, params.exp_n);
}

double ultimate_hotspot_rise(double load_pu, const TransformerParams& params) {
    if (!std::isfinite(load_pu) || load_pu < 0.0) {
        throw InvalidInputError("load_pu must be finite and >= 0, got " +
                                std::to_string(load_pu));
    }
    return params.delta_theta_h_rated * std::pow(load_pu, 2.0 * params.exp_m);
}

double exponential_rise(double initial, double ultimate, double tau_hours,
                        double t_hours) {
    require_finite(initial, "initial");
    require_finite(ultimate, "ultimate");
    if (!std::isfinite(tau_hours) || !(tau_hours > 0.0)) {
        throw InvalidInputError("tau_hours must be finite and > 0");
    }
    if (!std::isfinite(t_hours) || t_hours < 0.0) {
        throw InvalidInputError("t_hours must be finite and >= 0");
    }
    return (ultimate - initial) * (1.0 - std::exp(-t_hours / tau_hours)) + initial;
}

double hotspot_temperature(double ambient_c, double delta_theta_to,
                           double delta_theta_h) {
    require_finite(ambient_c, "ambient_c");
    require_finite(delta_theta_to, "delta_theta_to");
    require_finite(delta_theta_h, "delta_theta_h");
    return ambient_c + delta_theta_to + delta_theta_h;
}

ThermalState steady_state(double load_pu, const TransformerParams& params) {
    return ThermalState{ultimate_top_oil_rise(load_pu, params),
                        ultimate_hotspot_rise(load_pu, params)};
}

ThermalStepResult step_thermal(const ThermalState& state, const ThermalStepInput& input,
                               const TransformerParams& params) {
    require_finite(state.delta_theta_to, "state.delta_theta_to");
    require_finite(state.delta_theta_h, "state.delta_theta_h");
    if (!std::isfinite(input.load_prev_pu) || input.load_prev_pu < 0.0) {
        throw InvalidInputError("load_prev_pu must be finite and >= 0");
    }
    if (!std::isfinite(input.load_now_pu) || input.load_now_pu < 0.0) {
        throw InvalidInputError("load_now_pu must be finite and >= 0");
    }
    require_finite(input.ambient_c, "ambient_c");
    if (!std::isfinite(input.dt_hours) || !(input.dt_hours > 0.0)) {
        throw InvalidInputError("dt_hours must be finite and > 0");
    }

    const double ult_to = ultimate_top_oil_rise(input.load_now_pu, params);
    const double ult_h = ultimate_hotspot_rise(input.load_now_pu, params);
    ThermalState next;
    next.delta_theta_to =
        exponential_rise(state.delta_theta_to, ult_to, params.tau_to, input.dt_hours);
    next.delta_theta_h =
        exponential_rise(state.delta_theta_h, ult_h, params.tau_w, input.dt_hours);
    const double theta_h =
        hotspot_temperature(input.ambient_c, next.delta_theta_to, next.delta_theta_h);
    return ThermalStepResult{next, theta_h,
                             aging_acceleration_factor(theta_h, params)};
}

}  // namespace txlife::thermal
