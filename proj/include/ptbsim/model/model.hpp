#pragma once

#include <utility>

#include "ptbsim/engine/builtins.hpp"
#include "ptbsim/engine/simulation.hpp"
#include "ptbsim/model/parameters.hpp"
#include "ptbsim/model/sectors.hpp"

namespace ptbsim::model {

using engine::FirstOrderKind;
using engine::FirstOrderState;

struct ModelState {
    double lal_pop = 0.0;              // people
    double vul_pop = 0.0;              // people
    double resources = 0.0;            // $
    double insurances = 0.0;           // people
    double school_funds_status = 0.0;  // people
    FirstOrderState realized_gap_delay;
    FirstOrderState insured_frac_delay;
    FirstOrderState crime_perception_smooth;
    FirstOrderState vul_immigration_smooth;
    double pbr_prev = 0.0;  // PBR of the previous step, feeds the gap delay

    friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// Stocks at the start of a run. Smooths start at their input's initial
/// value so they begin in equilibrium.
inline ModelState initial_state(const Parameters& p, double start_time) {
    ModelState s;
    s.lal_pop = p.initial_lal_pop();
    s.vul_pop = p.initial_vul_pop();
    s.resources = p.initial_resources;
    s.insurances = p.initial_insurances;
    s.school_funds_status = p.initial_school_funds_status;
    s.realized_gap_delay =
        engine::first_order_init(FirstOrderKind::MaterialDelay, p.initial_realized_gap, p.time_to_realize_gap);
    s.insured_frac_delay = engine::first_order_init(FirstOrderKind::MaterialDelay, p.initial_insured_frac,
                                                    p.time_to_implement_policies);

    const double relative_crime =
        community_crime_rate(s.lal_pop, s.vul_pop, p) / p.national_crime(start_time);
    s.crime_perception_smooth =
        engine::first_order_init(FirstOrderKind::InformationSmooth, relative_crime, p.crime_info_delay);
    const double frac_lal_out =
        p.crime_perception(relative_crime) * static_cast<double>(p.switches.outmigration);
    s.vul_immigration_smooth = engine::first_order_init(
        FirstOrderKind::InformationSmooth,
        frac_lal_out * p.relative_vul_immigration * static_cast<double>(p.switches.immigration),
        p.vul_migration_time_delay);
    s.pbr_prev = p.desired_pbr + p.initial_realized_gap;
    return s;
}

/// The full three-sector model as a steppable system.
class PretermModel {
public:
    using State = ModelState;

    explicit PretermModel(Parameters params) : params_(std::move(params)) { params_.validate(); }

    [[nodiscard]] const Parameters& parameters() const noexcept { return params_; }

    [[nodiscard]] ModelState initial_state(double start_time) const {
        return model::initial_state(params_, start_time);
    }

    ModelState step(const ModelState& s, double t, double dt, engine::StepContext& ctx) const {
        const Parameters& p = params_;

        const double shock = financial_shock(t, p);
        const CrimeBlock crime = crime_block(s.lal_pop, s.vul_pop, t, s.crime_perception_smooth,
                                             s.vul_immigration_smooth, p);
        const double income = financial_resources(s.lal_pop, s.vul_pop, shock, p);
        const double realized_gap = s.realized_gap_delay.output();
        const ResourceAllocation alloc = resource_allocation(s.resources, realized_gap, p);
        const InsuranceDynamics ins =
            insurance_dynamics(s.vul_pop, s.insurances, alloc.healthcare, s.insured_frac_delay, p);
        const SchoolFunding school = school_funding(s.lal_pop, s.vul_pop, alloc.schools, s.school_funds_status, p);
        const PopulationFlows flows = population_flows(s.lal_pop, s.vul_pop, school.upward_mobility,
                                                       crime.frac_lal_out, crime.frac_vul_in, shock, p);
        const PretermOutcome birth = preterm_block(flows.birth_lal, flows.vul_births, ins.insured_frac, p);
        const double gap = s.pbr_prev - p.desired_pbr;

        if (s.resources < 0.0) ctx.warn("resources", s.resources, "Resources stock is negative");
        if (s.insurances < 0.0) ctx.warn("insurances", s.insurances, "Insurances stock is negative");

        ctx.record("lal_pop", s.lal_pop);
        ctx.record("vul_pop", s.vul_pop);
        ctx.record("total_pop", s.lal_pop + s.vul_pop);
        ctx.record("resources", s.resources);
        ctx.record("insurances", s.insurances);
        ctx.record("school_funds_status", s.school_funds_status);
        ctx.record("pbr", birth.pbr);
        ctx.record("desired_pbr", p.desired_pbr);
        ctx.record("gap", gap);
        ctx.record("realized_gap", realized_gap);
        ctx.record("vor", birth.vor);
        ctx.record("insured_frac", ins.insured_frac);
        ctx.record("total_births", birth.total_births);
        ctx.record("preterm_births", birth.preterm_births);
        ctx.record("lal_preterm_births", birth.lal_preterm_births);
        ctx.record("vul_preterm_births", birth.vul_preterm_births);
        ctx.record("financial_shock", shock);
        ctx.record("financial_resources", income);
        ctx.record("pct_medicaid", alloc.pct_medicaid);
        ctx.record("resources_allocated_to_healthcare", alloc.healthcare);
        ctx.record("resources_on_schools", alloc.schools);
        ctx.record("resources_other", alloc.other);
        ctx.record("desired_medical_resources", ins.desired_medical_resources);
        ctx.record("adequacy_of_resources_for_insurances", ins.adequacy);
        ctx.record("changes_in_insurances", ins.changes_in_insurances);
        ctx.record("school_age_children", school.school_age_children);
        ctx.record("school_funds_available", school.funds_available);
        ctx.record("desired_school_funds", school.desired_funds);
        ctx.record("adequacy_of_school_funds", school.adequacy);
        ctx.record("vul_frac", school.vul_frac);
        ctx.record("transition_fraction", school.transition_fraction);
        ctx.record("upward_mobility", school.upward_mobility);
        ctx.record("community_crime_rate", crime.community_rate);
        ctx.record("national_crime_rate", crime.national_rate);
        ctx.record("relative_crime", crime.relative_crime);
        ctx.record("perception_of_crime", crime.perception);
        ctx.record("frac_lal_out", crime.frac_lal_out);
        ctx.record("frac_vul_in", crime.frac_vul_in);
        ctx.record("birth_lal", flows.birth_lal);
        ctx.record("vul_births", flows.vul_births);
        ctx.record("lal_death", flows.lal_death);
        ctx.record("vul_death", flows.vul_death);
        ctx.record("transition_to_vul", flows.transition_to_vul);
        ctx.record("net_transition_to_low", flows.net_transition_to_low);
        ctx.record("net_lal_flow", flows.net_lal_flow);
        ctx.record("net_vul_flow", flows.net_vul_flow);
        ctx.record("net_migration", flows.net_migration);

        ModelState next = s;
        next.lal_pop += dt * flows.d_lal;
        next.vul_pop += dt * flows.d_vul;
        next.resources += dt * (income - alloc.other - alloc.healthcare - alloc.schools);
        next.insurances += dt * ins.changes_in_insurances;
        next.school_funds_status += dt * school.adequacy;
        next.realized_gap_delay = engine::first_order_step(s.realized_gap_delay, gap, dt).state;
        if (ins.delay_input) {
            next.insured_frac_delay = engine::first_order_step(s.insured_frac_delay, *ins.delay_input, dt).state;
        }
        next.crime_perception_smooth =
            engine::first_order_step(s.crime_perception_smooth, crime.relative_crime, dt).state;
        next.vul_immigration_smooth =
            engine::first_order_step(s.vul_immigration_smooth, crime.vul_in_input, dt).state;
        next.pbr_prev = birth.pbr;
        return next;
    }

private:
    Parameters params_;
};

/// Runs the model from its default initial state.
inline engine::RunResult simulate(const Parameters& p, const engine::SimConfig& config = {}) {
    const PretermModel model(p);
    return engine::run(model, config, model.initial_state(config.start_time));
}

}  // namespace ptbsim::model
