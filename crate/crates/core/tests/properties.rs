//! Operator identities on random small polynomial differential functions.

mod common;

use common::*;
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (String, String)> {
    (expr_text(), expr_text())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn adjoint_identity_holds(f in expr_text(), (v0, v1) in pair(), w in expr_text()) {
        let sp = space();
        let v = [parse(&sp, &v0), parse(&sp, &v1)];
        adjoint_identity(&sp, &parse(&sp, &f), &v, &parse(&sp, &w)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn euler_lagrange_relation(f in expr_text(), (v0, v1) in pair()) {
        let sp = space();
        let v = [parse(&sp, &v0), parse(&sp, &v1)];
        euler_lagrange(&sp, &parse(&sp, &f), &v).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn euler_product_rule((f, g) in pair()) {
        let sp = space();
        product_rule(&sp, &parse(&sp, &f), &parse(&sp, &g)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn euler_kills_divergences(f in expr_text()) {
        let sp = space();
        divergence_annihilation(&sp, &parse(&sp, &f)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn frechet_from_higher_euler(f in expr_text(), (v0, v1) in pair()) {
        let sp = space();
        let v = [parse(&sp, &v0), parse(&sp, &v1)];
        frechet_via_higher_euler(&sp, &parse(&sp, &f), &v).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn total_derivatives_commute(f in expr_text()) {
        let sp = space();
        commutation(&sp, &parse(&sp, &f)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn restriction_is_idempotent(f in expr_text()) {
        let sys = evolution_system();
        restrict_idempotent(&sys, &parse(&sys.space, &f)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn difference_quotients_converge(
        f in expr_text(),
        (v0, v1) in pair(),
        vals in prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 8),
    ) {
        let sp = space();
        let v = [parse(&sp, &v0), parse(&sp, &v1)];
        finite_difference(&sp, &parse(&sp, &f), &v, &vals).map_err(TestCaseError::fail)?;
    }
}
