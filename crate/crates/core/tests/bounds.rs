use detour_core::bounds::{
    analytic_lb, b_of_k, k_values, lower_bound_table, upper_curve, Curve, LowerBoundKind, OMode,
    PROFILE_EPS,
};

#[test]
fn restrict_curve_dominates_the_grid_bound() {
    let ks = k_values(0.0, 0.95, 0.05).unwrap();
    for rec in lower_bound_table(&ks, 200, OMode::Fixed05, PROFILE_EPS).unwrap() {
        let upper = upper_curve(Curve::Restrict, rec.k, 0.0).unwrap();
        assert!(upper >= rec.safe - 1e-9, "k={} upper {upper} safe {}", rec.k, rec.safe);
        assert!(rec.safe >= rec.analytic);
    }
}

#[test]
fn sweep_never_lowers_the_bound() {
    for k in [0.1, 0.6] {
        let fixed = b_of_k(k, 120, OMode::Fixed05, PROFILE_EPS).unwrap();
        let sweep = b_of_k(k, 120, OMode::Sweep, PROFILE_EPS).unwrap();
        assert_eq!(sweep.o_values.len(), 21);
        assert_eq!(sweep.per_o[0], fixed.per_o[0]);
        assert!(sweep.raw >= fixed.raw);
    }
}

#[test]
fn randomized_curve_sits_between_its_bounds() {
    for k in k_values(0.0, 0.99, 0.01).unwrap() {
        let lb = analytic_lb(LowerBoundKind::Randomized, k, 0.0).unwrap();
        let mc = upper_curve(Curve::RandMaxCost, k, 0.0).unwrap();
        assert!(lb <= mc + 1e-12, "k={k}");
        assert!(mc <= upper_curve(Curve::TwoExtreme, k, 0.0).unwrap() + 1e-12);
    }
}
