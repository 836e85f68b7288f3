use parcave::concavity::{check_s_concave, s_mean};
use parcave::hopf_lax::{hopf_lax, PowerCost};
use parcave::{Density1D, GridFunction, IntervalUnion, VolumeCurve};
use proptest::prelude::*;

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (simpson(f, a, m), simpson(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= 15.0 * eps {
            l + r + (l + r - whole) / 15.0
        } else {
            go(f, a, m, l, 0.5 * eps, depth - 1) + go(f, m, b, r, 0.5 * eps, depth - 1)
        }
    }
    go(f, a, b, simpson(f, a, b), eps, depth)
}

fn interval_union() -> impl Strategy<Value = IntervalUnion> {
    prop::collection::vec((0.05f64..2.0, 0.05f64..3.0), 1..6).prop_map(|parts| {
        let mut x = -4.0;
        let mut raw = Vec::new();
        for (gap, len) in parts {
            x += gap;
            raw.push((x, x + len));
            x += len;
        }
        IntervalUnion::new(raw).unwrap()
    })
}

fn density() -> impl Strategy<Value = Density1D> {
    prop_oneof![
        (0.2f64..3.0, -5.0f64..0.0, 1.0f64..6.0).prop_map(|(c, a, w)| Density1D::uniform(c, a, a + w).unwrap()),
        (-3.0f64..3.0, 0.3f64..3.0).prop_map(|(m, sd)| Density1D::gaussian(m, sd).unwrap()),
        (prop::sample::select(vec![-0.5, 0.25, 0.5, 1.0, 2.0]), 0.1f64..2.0, -5.0f64..0.0, 2.0f64..8.0)
            .prop_map(|(g, off, a, w)| Density1D::power(g, off - a, a, a + w).unwrap()),
    ]
}

/// |A + [-t, t]| for Lebesgue measure: each gap is filled at rate 2 until it closes.
fn lebesgue_oracle(set: &IntervalUnion, t: f64) -> f64 {
    let iv = set.intervals();
    let gaps = iv.windows(2).map(|w| (w[1].0 - w[0].1).min(2.0 * t)).sum::<f64>();
    set.total_length() + 2.0 * t + gaps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measure_is_additive(d in density(), a in -6.0f64..6.0, w1 in 0.0f64..4.0, w2 in 0.0f64..4.0) {
        let (b, c) = (a + w1, a + w1 + w2);
        let whole = d.integrate(a, c).unwrap();
        let parts = d.integrate(a, b).unwrap() + d.integrate(b, c).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-10 * whole.max(1.0));
    }

    #[test]
    fn quadrature_matches_adaptive_simpson(d in density(), a in -6.0f64..6.0, w in 0.01f64..5.0) {
        let (lo, hi) = match d.support() {
            Some((lo, hi)) => (a.max(lo), (a + w).min(hi)),
            None => (a, a + w),
        };
        prop_assume!(hi > lo);
        let exact = d.integrate(lo, hi).unwrap();
        let oracle = adaptive_simpson(&|x| d.density_at(x), lo, hi, 1e-12, 40);
        prop_assert!((exact - oracle).abs() <= 1e-8 * exact.max(1.0), "{exact} vs {oracle}");
    }

    #[test]
    fn power_mean_is_monotone_in_s(a in 0.01f64..10.0, b in 0.01f64..10.0, lambda in 0.0f64..=1.0,
                                   r in -5.0f64..5.0, ds in 0.0f64..5.0) {
        let lo = s_mean(a, b, lambda, r).unwrap();
        let hi = s_mean(a, b, lambda, r + ds).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn power_mean_is_homogeneous(a in 0.01f64..10.0, b in 0.01f64..10.0, lambda in 0.0f64..=1.0,
                                 s in -3.0f64..3.0, c in 0.1f64..10.0) {
        let scaled = s_mean(c * a, c * b, lambda, s).unwrap();
        let base = c * s_mean(a, b, lambda, s).unwrap();
        prop_assert!((scaled - base).abs() <= 1e-12 * base);
    }

    #[test]
    fn s_concave_implies_r_concave(s in 0.1f64..2.0, dr in 0.0f64..3.0, slope in 0.1f64..3.0, c in 0.1f64..10.0) {
        // V^s affine
        let v = move |t: f64| c * (1.0 + slope * t).powf(1.0 / s);
        prop_assert!(check_s_concave(v, 0.0, 2.0, s, 41, 1e-9).unwrap().passed());
        prop_assert!(check_s_concave(v, 0.0, 2.0, s - dr, 41, 1e-9).unwrap().passed());
    }

    #[test]
    fn lebesgue_volume_is_piecewise_affine(set in interval_union(), t in 0.0f64..5.0) {
        let oracle = lebesgue_oracle(&set, t);
        let curve = VolumeCurve::new(set, Density1D::Lebesgue);
        prop_assert!((curve.eval(t).unwrap() - oracle).abs() <= 1e-9 * oracle);
    }

    #[test]
    fn one_sided_derivatives_are_ordered(set in interval_union(), d in density(), t in 0.01f64..4.0) {
        let curve = VolumeCurve::new(set, d);
        let left = curve.derivative_left(t).unwrap();
        let right = curve.derivative_right(t).unwrap();
        prop_assert!(right <= left + 1e-9 * left.abs().max(1.0), "{right} > {left}");
    }

    #[test]
    fn merges_are_concave_kinks(set in interval_union(), c in 0.1f64..5.0) {
        let curve = VolumeCurve::new(set, Density1D::uniform(c, -100.0, 100.0).unwrap());
        for t in curve.breakpoint_times().into_iter().filter(|&t| t > 0.0) {
            let (left, right) = (curve.derivative_left(t).unwrap(), curve.derivative_right(t).unwrap());
            prop_assert!(right < left, "t = {t}: {right} >= {left}");
        }
    }

    #[test]
    fn dilation_is_a_semigroup(set in interval_union(), t in 0.0f64..2.0, s in 0.0f64..2.0) {
        let twice = set.dilate(t).unwrap().dilate(s).unwrap();
        let once = set.dilate(t + s).unwrap();
        prop_assert_eq!(twice.component_count(), once.component_count());
        for (x, y) in twice.intervals().iter().zip(once.intervals()) {
            prop_assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
        }
    }
}

fn wiggle(amp: f64, freq: f64, shift: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| 0.5 * x * x + amp * (freq * x + shift).sin()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hopf_lax_preserves_order(amp in 0.0f64..1.0, freq in 0.5f64..3.0, bump in 0.0f64..2.0,
                                p in prop::sample::select(vec![1.0, 1.5, 2.0, 4.0]), t in 0.05f64..2.0) {
        let u = GridFunction::from_fn(-5.0, 5.0, 201, wiggle(amp, freq, 0.0)).unwrap();
        let w = GridFunction::from_fn(-5.0, 5.0, 201, |x| wiggle(amp, freq, 0.0)(x) + bump * (-x * x).exp()).unwrap();
        let v = PowerCost::new(p).unwrap();
        let (qu, qw) = (hopf_lax(&u, &v, t).unwrap(), hopf_lax(&w, &v, t).unwrap());
        for (a, b) in qu.values().iter().zip(qw.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn hopf_lax_semigroup(amp in 0.0f64..0.3, freq in 0.5f64..2.0, shift in 0.0f64..3.0,
                          t in 0.1f64..1.0, s in 0.1f64..1.0) {
        let u = GridFunction::from_fn(-5.0, 5.0, 401, wiggle(amp, freq, shift)).unwrap();
        let v = PowerCost::new(2.0).unwrap();
        let composed = hopf_lax(&hopf_lax(&u, &v, t).unwrap(), &v, s).unwrap();
        let direct = hopf_lax(&u, &v, t + s).unwrap();
        let dz = u.step();
        // interior nodes, away from the truncated domain
        for i in 100..301 {
            let (c, d) = (composed.values()[i], direct.values()[i]);
            prop_assert!(c >= d - 1e-12, "node {i}: {c} < {d}");
            prop_assert!(c <= d + dz * dz / s.min(t), "node {i}: {c} vs {d}");
        }
    }
}
