#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ptbsim/engine/lookup.hpp"

namespace ptbsim::model {

using engine::LookupTable;

struct UnknownParameter : std::invalid_argument {
    explicit UnknownParameter(std::string_view name)
        : std::invalid_argument("unknown parameter '" + std::string(name) + "'") {}
};

/// Budget share sent to Medicaid as a function of the realized PBR gap.
inline LookupTable gap_pressure_table() {
    return LookupTable{{-10.0, 0.101316}, {-4.0, 0.11},        {0.168196, 0.17193},
                       {2.76758, 0.297807}, {4.90826, 0.389912}, {7.43119, 0.439035},
                       {10.1835, 0.475877}, {14.5, 0.482018},    {15.0765, 0.488158}};
}

/// US violent crimes per 100k by year.
inline LookupTable national_crime_table() {
    return LookupTable{{1995, 684.46}, {1996, 636.64}, {1997, 611.0}, {1998, 567.6}, {1999, 523.0},
                       {2000, 506.5},  {2001, 504.5},  {2002, 494.4}, {2003, 475.8}, {2004, 463.2},
                       {2005, 469.0},  {2006, 479.3},  {2007, 471.8}, {2008, 458.6}, {2009, 431.9},
                       {2010, 404.5},  {2011, 387.1},  {2012, 387.8}, {2013, 369.1}, {2014, 361.6},
                       {2015, 373.7},  {2016, 386.3},  {2017, 382.9}};
}

/// Fraction of LAL residents leaving per year given perceived relative crime.
inline LookupTable crime_perception_table() {
    return LookupTable{{0.66, -0.015}, {0.8, -0.01},  {0.9, -0.005}, {1.0, 0.0},
                       {1.1, 0.005},   {1.25, 0.01},  {1.5, 0.015},  {2.0, 0.015}};
}

struct Switches {
    int education = 1;
    int medical_interventions = 1;
    int outmigration = 1;
    int immigration = 1;

    void validate() const {
        for (int v : {education, medical_interventions, outmigration, immigration}) {
            if (v != 0 && v != 1) throw std::invalid_argument("switches must be 0 or 1");
        }
    }

    static Switches all_off() { return {0, 0, 0, 0}; }
};

struct Parameters {
    // population
    double initial_percent_vul = 0.28;
    double initial_county_pop = 1.42262e6;
    double frac_br_lal = 0.015;
    double frac_br_vul = 0.015;
    double frac_dr_lal = 0.015;
    double frac_dr_vul = 0.015;
    double frac_becoming_vulnerable = 0.4;
    double family_size = 2.0;
    double time_for_education_impact = 10.0;
    double preterm_rate_lal = 0.104;
    double vul_preterm_odd_ratio = 2.03;
    double medical_care_effect = 0.86;

    // resources
    double relative_contribution_vul = 0.58;
    double tax_contribution_lal = 3500.0;
    double shock_magnitude = 0.35;
    double time_of_shock = 2000.0;
    double shock_duration = 2.0;
    double initial_resources = 4e9;
    double frac_resources_other = 0.4;
    double desired_pbr = 11.2;
    double time_to_realize_gap = 2.0;
    double initial_realized_gap = 3.0;
    double avg_insurance_cost = 4300.0;
    double federal_match = 1.75;
    double initial_insurances = 500000.0;
    double time_to_implement_policies = 1.0;
    double initial_insured_frac = 0.5;
    double school_age_percentage = 0.16 * 2;
    double desired_frac_school_funding = 0.65;
    double local_government_match = 2.3;
    double avg_cost_schooling = 13000.0;
    double initial_school_funds_status = 0.0;

    // crime
    double crime_rate_lal = 450.0 / 100000.0;
    double relative_crime_vul = 4.0;
    double crime_info_delay = 1.0;
    double relative_vul_immigration = 0.45;
    double vul_migration_time_delay = 1.0;

    Switches switches;

    LookupTable gap_pressure = gap_pressure_table();
    LookupTable national_crime = national_crime_table();
    LookupTable crime_perception = crime_perception_table();

    [[nodiscard]] double initial_vul_pop() const { return initial_percent_vul * initial_county_pop; }
    [[nodiscard]] double initial_lal_pop() const { return initial_county_pop * (1.0 - initial_percent_vul); }

    void validate() const;
};

namespace detail {

struct ScalarField {
    std::string_view name;
    double Parameters::*member;
};

struct SwitchField {
    std::string_view name;
    int Switches::*member;
};

inline constexpr std::array kScalarFields{
    ScalarField{"initial_percent_vul", &Parameters::initial_percent_vul},
    ScalarField{"initial_county_pop", &Parameters::initial_county_pop},
    ScalarField{"frac_br_lal", &Parameters::frac_br_lal},
    ScalarField{"frac_br_vul", &Parameters::frac_br_vul},
    ScalarField{"frac_dr_lal", &Parameters::frac_dr_lal},
    ScalarField{"frac_dr_vul", &Parameters::frac_dr_vul},
    ScalarField{"frac_becoming_vulnerable", &Parameters::frac_becoming_vulnerable},
    ScalarField{"family_size", &Parameters::family_size},
    ScalarField{"time_for_education_impact", &Parameters::time_for_education_impact},
    ScalarField{"preterm_rate_lal", &Parameters::preterm_rate_lal},
    ScalarField{"vul_preterm_odd_ratio", &Parameters::vul_preterm_odd_ratio},
    ScalarField{"medical_care_effect", &Parameters::medical_care_effect},
    ScalarField{"relative_contribution_vul", &Parameters::relative_contribution_vul},
    ScalarField{"tax_contribution_lal", &Parameters::tax_contribution_lal},
    ScalarField{"shock_magnitude", &Parameters::shock_magnitude},
    ScalarField{"time_of_shock", &Parameters::time_of_shock},
    ScalarField{"shock_duration", &Parameters::shock_duration},
    ScalarField{"initial_resources", &Parameters::initial_resources},
    ScalarField{"frac_resources_other", &Parameters::frac_resources_other},
    ScalarField{"desired_pbr", &Parameters::desired_pbr},
    ScalarField{"time_to_realize_gap", &Parameters::time_to_realize_gap},
    ScalarField{"initial_realized_gap", &Parameters::initial_realized_gap},
    ScalarField{"avg_insurance_cost", &Parameters::avg_insurance_cost},
    ScalarField{"federal_match", &Parameters::federal_match},
    ScalarField{"initial_insurances", &Parameters::initial_insurances},
    ScalarField{"time_to_implement_policies", &Parameters::time_to_implement_policies},
    ScalarField{"initial_insured_frac", &Parameters::initial_insured_frac},
    ScalarField{"school_age_percentage", &Parameters::school_age_percentage},
    ScalarField{"desired_frac_school_funding", &Parameters::desired_frac_school_funding},
    ScalarField{"local_government_match", &Parameters::local_government_match},
    ScalarField{"avg_cost_schooling", &Parameters::avg_cost_schooling},
    ScalarField{"initial_school_funds_status", &Parameters::initial_school_funds_status},
    ScalarField{"crime_rate_lal", &Parameters::crime_rate_lal},
    ScalarField{"relative_crime_vul", &Parameters::relative_crime_vul},
    ScalarField{"crime_info_delay", &Parameters::crime_info_delay},
    ScalarField{"relative_vul_immigration", &Parameters::relative_vul_immigration},
    ScalarField{"vul_migration_time_delay", &Parameters::vul_migration_time_delay},
};

inline constexpr std::array kSwitchFields{
    SwitchField{"switch_education", &Switches::education},
    SwitchField{"switch_medical_interventions", &Switches::medical_interventions},
    SwitchField{"switch_outmigration", &Switches::outmigration},
    SwitchField{"switch_immigration", &Switches::immigration},
};

}  // namespace detail

/// Names accepted by get_parameter / set_parameter, scalars first, then switches.
inline std::vector<std::string> parameter_names() {
    std::vector<std::string> out;
    for (const auto& f : detail::kScalarFields) out.emplace_back(f.name);
    for (const auto& f : detail::kSwitchFields) out.emplace_back(f.name);
    return out;
}

inline bool is_parameter(std::string_view name) {
    for (const auto& f : detail::kScalarFields)
        if (f.name == name) return true;
    for (const auto& f : detail::kSwitchFields)
        if (f.name == name) return true;
    return false;
}

inline bool is_switch(std::string_view name) {
    for (const auto& f : detail::kSwitchFields)
        if (f.name == name) return true;
    return false;
}

inline double get_parameter(const Parameters& p, std::string_view name) {
    for (const auto& f : detail::kScalarFields)
        if (f.name == name) return p.*(f.member);
    for (const auto& f : detail::kSwitchFields)
        if (f.name == name) return static_cast<double>(p.switches.*(f.member));
    throw UnknownParameter(name);
}

inline void set_parameter(Parameters& p, std::string_view name, double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("parameter '" + std::string(name) + "' must be finite");
    }
    for (const auto& f : detail::kScalarFields) {
        if (f.name == name) {
            p.*(f.member) = value;
            return;
        }
    }
    for (const auto& f : detail::kSwitchFields) {
        if (f.name == name) {
            if (value != 0.0 && value != 1.0) {
                throw std::invalid_argument("switch '" + std::string(name) + "' must be 0 or 1");
            }
            p.switches.*(f.member) = static_cast<int>(value);
            return;
        }
    }
    throw UnknownParameter(name);
}

inline void apply_overrides(Parameters& p, const std::map<std::string, double>& overrides) {
    for (const auto& [name, value] : overrides) set_parameter(p, name, value);
}

inline void Parameters::validate() const {
    auto positive = [](std::string_view name, double v) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    auto fraction = [](std::string_view name, double v) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    };
    positive("initial_county_pop", initial_county_pop);
    positive("time_for_education_impact", time_for_education_impact);
    positive("time_to_realize_gap", time_to_realize_gap);
    positive("time_to_implement_policies", time_to_implement_policies);
    positive("crime_info_delay", crime_info_delay);
    positive("vul_migration_time_delay", vul_migration_time_delay);
    positive("avg_insurance_cost", avg_insurance_cost);
    positive("avg_cost_schooling", avg_cost_schooling);
    positive("tax_contribution_lal", tax_contribution_lal);
    positive("school_age_percentage", school_age_percentage);
    fraction("initial_percent_vul", initial_percent_vul);
    fraction("preterm_rate_lal", preterm_rate_lal);
    fraction("medical_care_effect", medical_care_effect);
    fraction("initial_insured_frac", initial_insured_frac);
    fraction("desired_frac_school_funding", desired_frac_school_funding);
    fraction("frac_resources_other", frac_resources_other);
    if (shock_duration < 0.0) throw std::invalid_argument("shock_duration must be non-negative");
    switches.validate();
}

}  // namespace ptbsim::model
