#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "ptbsim/engine/builtins.hpp"
#include "ptbsim/model/parameters.hpp"

// Algebraic blocks of the three-sector preterm-birth model. Each block is a
// pure function of stocks, time, first-order outputs and parameters.

namespace ptbsim::model {

[[nodiscard]] inline double financial_shock(double t, const Parameters& p) noexcept {
    return p.shock_magnitude * engine::pulse(t, p.time_of_shock, p.shock_duration);
}

/// Tax income in $/yr. A vulnerable resident contributes a fraction of an LAL resident.
[[nodiscard]] inline double financial_resources(double lal, double vul, double shock, const Parameters& p) noexcept {
    return (vul * p.relative_contribution_vul + lal) * p.tax_contribution_lal * (1.0 - shock);
}

struct ResourceAllocation {
    double pct_medicaid;  // 1/yr
    double healthcare;    // $/yr
    double schools;       // $/yr
    double other;         // $/yr
};

[[nodiscard]] inline ResourceAllocation resource_allocation(double resources, double realized_gap,
                                                            const Parameters& p) noexcept {
    const double pct = p.gap_pressure(realized_gap);
    return ResourceAllocation{
        .pct_medicaid = pct,
        .healthcare = pct * resources,
        .schools = (1.0 - pct - p.frac_resources_other) * resources,
        .other = p.frac_resources_other * resources,
    };
}

struct InsuranceDynamics {
    double desired_medical_resources;  // $/yr
    double adequacy;                   // $/yr
    double changes_in_insurances;      // people/yr
    double insured_frac;               // clamped delay output
    std::optional<double> delay_input;  // Insurances/Vul; empty when Vul is zero
};

[[nodiscard]] inline InsuranceDynamics insurance_dynamics(double vul, double insurances, double healthcare,
                                                          const engine::FirstOrderState& insured_delay,
                                                          const Parameters& p) noexcept {
    InsuranceDynamics out{};
    out.desired_medical_resources = vul * p.avg_insurance_cost;
    out.adequacy = healthcare * p.federal_match - out.desired_medical_resources;
    out.changes_in_insurances = out.adequacy / p.avg_insurance_cost;
    out.insured_frac = std::clamp(insured_delay.output(), 0.0, 1.0);
    if (vul > 0.0) {
        out.delay_input = insurances / vul;
    }
    return out;
}

struct SchoolFunding {
    double school_age_children;   // people/yr
    double lal_school_age;        // people/yr
    double funds_available;       // people/yr
    double desired_funds;         // people/yr
    double adequacy;              // people/yr
    double vul_frac;
    double gate;                  // in [-1, 1]
    double transition_fraction;
    double upward_mobility;       // 1/yr
};

[[nodiscard]] inline SchoolFunding school_funding(double lal, double vul, double schools, double status,
                                                  const Parameters& p) noexcept {
    SchoolFunding out{};
    out.lal_school_age = p.school_age_percentage * lal;
    out.school_age_children = out.lal_school_age + p.school_age_percentage * vul;
    out.funds_available = schools * p.local_government_match / p.avg_cost_schooling;
    out.desired_funds = out.school_age_children * p.desired_frac_school_funding;
    out.adequacy = out.funds_available - out.desired_funds;
    const double total = lal + vul;
    out.vul_frac = total > 0.0 ? vul / total : 0.0;
    if (status > 0.0) {
        out.gate = 1.0;
    } else if (out.lal_school_age > 0.0) {
        out.gate = std::max(status / out.lal_school_age, -1.0);
    } else {
        out.gate = status < 0.0 ? -1.0 : 0.0;
    }
    out.transition_fraction =
        p.school_age_percentage * out.gate * (p.desired_frac_school_funding - out.vul_frac);
    out.upward_mobility = out.transition_fraction * p.family_size / p.time_for_education_impact *
                          static_cast<double>(p.switches.education);
    return out;
}

struct CrimeBlock {
    double community_rate;   // crimes/100k/yr
    double national_rate;    // crimes/100k/yr
    double relative_crime;
    double perception;       // smoothed relative crime
    double frac_lal_out;     // 1/yr, positive means LAL leave
    double frac_vul_in;      // 1/yr, smoothed
    double vul_in_input;     // input to the immigration smooth
};

[[nodiscard]] inline double community_crime_rate(double lal, double vul, const Parameters& p) noexcept {
    return ((lal + vul * p.relative_crime_vul) * p.crime_rate_lal) / (lal + vul) * 100000.0;
}

[[nodiscard]] inline CrimeBlock crime_block(double lal, double vul, double t,
                                            const engine::FirstOrderState& perception_smooth,
                                            const engine::FirstOrderState& vul_in_smooth,
                                            const Parameters& p) noexcept {
    CrimeBlock out{};
    out.community_rate = community_crime_rate(lal, vul, p);
    out.national_rate = p.national_crime(t);
    out.relative_crime = out.community_rate / out.national_rate;
    out.perception = perception_smooth.output();
    out.frac_lal_out = p.crime_perception(out.perception) * static_cast<double>(p.switches.outmigration);
    out.frac_vul_in = vul_in_smooth.output();
    out.vul_in_input =
        out.frac_lal_out * p.relative_vul_immigration * static_cast<double>(p.switches.immigration);
    return out;
}

struct PopulationFlows {
    double birth_lal;
    double vul_births;
    double lal_death;
    double vul_death;
    double transition_to_vul;
    double net_transition_to_low;
    double net_lal_flow;   // outflow
    double net_vul_flow;   // inflow
    double net_migration;
    double d_lal;
    double d_vul;
};

[[nodiscard]] inline PopulationFlows population_flows(double lal, double vul, double upward_mobility,
                                                      double frac_lal_out, double frac_vul_in, double shock,
                                                      const Parameters& p) noexcept {
    PopulationFlows f{};
    f.birth_lal = p.frac_br_lal * lal;
    f.vul_births = p.frac_br_vul * vul;
    f.lal_death = p.frac_dr_lal * lal;
    f.vul_death = p.frac_dr_vul * vul;
    f.transition_to_vul = shock * p.frac_becoming_vulnerable * lal;
    f.net_transition_to_low = upward_mobility * vul;
    f.net_lal_flow = frac_lal_out * lal;
    f.net_vul_flow = frac_vul_in * vul;
    f.net_migration = -f.net_lal_flow + f.net_vul_flow;
    f.d_lal = f.birth_lal + f.net_transition_to_low - f.lal_death - f.net_lal_flow - f.transition_to_vul;
    f.d_vul = f.net_vul_flow + f.transition_to_vul + f.vul_births - f.net_transition_to_low - f.vul_death;
    return f;
}

struct PretermOutcome {
    double vor;
    double lal_preterm_births;
    double vul_preterm_births;
    double preterm_births;
    double total_births;
    double pbr;  // percent
};

/// Vulnerable preterm odds ratio after prenatal coverage.
[[nodiscard]] inline double vulnerable_odds_ratio(double insured_frac, const Parameters& p) noexcept {
    const double med = static_cast<double>(p.switches.medical_interventions);
    return (1.0 - med) * p.vul_preterm_odd_ratio +
           med * p.vul_preterm_odd_ratio * (p.medical_care_effect * insured_frac + (1.0 - insured_frac));
}

[[nodiscard]] inline PretermOutcome preterm_block(double birth_lal, double vul_births, double insured_frac,
                                                  const Parameters& p) {
    PretermOutcome out{};
    out.total_births = birth_lal + vul_births;
    if (!(out.total_births > 0.0)) {
        throw std::domain_error("total births must be positive to compute PBR");
    }
    out.vor = vulnerable_odds_ratio(insured_frac, p);
    out.vul_preterm_births = out.vor * vul_births * p.preterm_rate_lal;
    out.lal_preterm_births = birth_lal * p.preterm_rate_lal;
    out.preterm_births = out.vul_preterm_births + out.lal_preterm_births;
    out.pbr = out.preterm_births / out.total_births * 100.0;
    return out;
}

}  // namespace ptbsim::model
