use charsum_core::fourier::{
    fourier_transform, inner, solve_monomial_transform, verify_transform_pointwise, GridFunction,
};
use charsum_core::suite::admissible_data;
use charsum_core::{CharContext, CycloValue, MultCharacter};
use num_bigint::BigInt;
use proptest::prelude::*;

const BOUND: u128 = 1 << 26;

fn q_pow(q: u64, e: usize) -> CycloValue {
    CycloValue::from_int(1).scale(&BigInt::from(q).pow(e as u32))
}

#[test]
fn double_transform_reflects() {
    for (p, k) in [(3u64, 2usize), (5, 2), (7, 1)] {
        let ctx = CharContext::build(p, 1, &[1]).unwrap();
        let f = GridFunction::try_from_coords(&ctx, 1, k, |c| {
            Ok(CycloValue::from_int(c.iter().enumerate().map(|(i, &x)| (i as i64 + 2) * x as i64 - 3).sum::<i64>()))
        })
        .unwrap();
        let twice = fourier_transform(&ctx, &fourier_transform(&ctx, &f, BOUND).unwrap(), BOUND).unwrap();
        assert_eq!(twice, f.reflected(&ctx).unwrap().scale(&q_pow(p, k)));
    }
}

#[test]
fn characters_transform_to_gauss_sums() {
    let ctx = CharContext::build(7, 1, &[1]).unwrap();
    let chars = MultCharacter::all(ctx.tower(), 1).unwrap();
    for a in chars.iter().skip(1) {
        for b in chars.iter().skip(1) {
            let f = GridFunction::character_product(&ctx, &[*a, *b]).unwrap();
            let fhat = fourier_transform(&ctx, &f, BOUND).unwrap();
            let g = &ctx.gauss_sum(a).unwrap() * &ctx.gauss_sum(b).unwrap();
            let want = GridFunction::character_product(&ctx, &[a.inv(), b.inv()]).unwrap().scale(&g);
            assert_eq!(fhat, want, "{a} {b}");
        }
    }
}

#[test]
fn naive_transform_matches_solver() {
    let mut checked = 0;
    for p in [5u64, 7] {
        let ctx = CharContext::build(p, 1, &[1]).unwrap();
        for datum in admissible_data(&ctx, &[3, 6]).unwrap() {
            let sol = solve_monomial_transform(&ctx, &datum).unwrap();
            let r = verify_transform_pointwise(&ctx, &datum, &sol, BOUND).unwrap();
            assert!(r.pass(), "q={p} {datum}: {} of {} points differ", r.mismatches.len(), r.points);
            checked += 1;
        }
    }
    assert!(checked >= 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plancherel(fv in prop::collection::vec(-5i64..5, 25), gv in prop::collection::vec(-5i64..5, 25)) {
        let ctx = CharContext::build(5, 1, &[1]).unwrap();
        let mk = |v: &[i64]| GridFunction::new(&ctx, 1, 2, v.iter().map(|&x| CycloValue::from_int(x)).collect()).unwrap();
        let (f, g) = (mk(&fv), mk(&gv));
        let fh = fourier_transform(&ctx, &f, BOUND).unwrap();
        let gh = fourier_transform(&ctx, &g, BOUND).unwrap();
        prop_assert_eq!(inner(&fh, &gh).unwrap(), &inner(&f, &g).unwrap() * &q_pow(5, 2));
    }
}

#[test]
fn full_suite_pointwise_sweep() {
    let r = charsum_core::suite::run_criterion(16, &Default::default()).unwrap();
    println!("{}", r.summary_line());
    assert!(r.checked >= 10, "{}", r.summary_line());
    assert!(r.failures().next().is_none(), "{:?}", r.failures().collect::<Vec<_>>());
}
