use crowdrate::bounds::{kic_error_at_rate, kic_rate_threshold, rmin_sl_cs, rmin_sl_uk, BoundQuery, RateBound};
use crowdrate::infomath::{entropy, symmetric_entropy, Pmf};
use crowdrate::kic::KicCode;
use crowdrate::pricing::{price_threshold, price_threshold_exact};
use crowdrate::worker::{MscChannel, SkillPopulation};
use crowdrate::SourceModel;
use proptest::prelude::*;

fn weights(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, 2..=max_len)
}

fn population() -> impl Strategy<Value = SkillPopulation> {
    (weights(8), prop::collection::vec(0.0f64..=1.0, 8)).prop_map(|(w, eps)| {
        let pmf = Pmf::normalized(w).unwrap();
        let levels = pmf
            .probabilities()
            .iter()
            .zip(eps)
            .map(|(&p, e)| (e, p))
            .collect();
        SkillPopulation::new(levels).unwrap()
    })
}

proptest! {
    #[test]
    fn entropy_bounded_by_alphabet(w in weights(12)) {
        let p = Pmf::normalized(w).unwrap();
        let h = entropy(&p).bits();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn entropy_permutation_invariant(w in weights(10), seed in any::<u64>()) {
        let p = Pmf::normalized(w.clone()).unwrap();
        let mut shuffled = w;
        let n = shuffled.len();
        shuffled.rotate_left((seed % n as u64) as usize);
        shuffled.reverse();
        let q = Pmf::normalized(shuffled).unwrap();
        prop_assert!((entropy(&p).bits() - entropy(&q).bits()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_entropy_matches_general_entropy(eps in 0.0f64..=1.0, n in 2usize..16) {
        let mut pmf = vec![eps / (n - 1) as f64; n];
        pmf[0] = 1.0 - eps;
        let direct = entropy(&Pmf::new(pmf).unwrap()).bits();
        prop_assert!((direct - symmetric_entropy(eps, n).unwrap().bits()).abs() < 1e-12);
    }

    #[test]
    fn msc_rows_are_distributions(m in 2usize..20, eps in 0.0f64..=1.0, u in 0usize..20) {
        let ch = MscChannel::new(m, eps).unwrap();
        let u = u % m;
        let row = ch.transition_row(u).unwrap();
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(row.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn known_skills_never_need_more_queries(
        pop in population(),
        m in 2usize..=8,
        eps in 0.0f64..=0.5,
        source in weights(5),
    ) {
        let source = SourceModel::new(Pmf::normalized(source).unwrap());
        let q = BoundQuery::new(source, m, pop, eps).unwrap();
        let cs = rmin_sl_cs(&q).unwrap().as_f64();
        let uk = rmin_sl_uk(&q).unwrap().as_f64();
        prop_assert!(cs <= uk * (1.0 + 1e-10) + 1e-10, "cs={} uk={}", cs, uk);
    }

    #[test]
    fn encode_is_relabeling_invariant(
        labels in prop::collection::vec(0usize..4, 1..9),
        shift in 1usize..4,
    ) {
        let code = KicCode::new(labels.len(), 4).unwrap();
        let relabeled: Vec<usize> = labels.iter().map(|l| (l + shift) % 4).collect();
        let reversed: Vec<usize> = labels.iter().map(|l| 3 - l).collect();
        let base = code.encode(&labels).unwrap();
        prop_assert_eq!(&code.encode(&relabeled).unwrap(), &base);
        prop_assert_eq!(&code.encode(&reversed).unwrap(), &base);
        prop_assert!(code.index_of(&base).is_some());
    }

    #[test]
    fn kic_threshold_inverts_error_formula(
        k in 1usize..=16,
        q in 0.01f64..0.99,
        frac in 0.001f64..0.999,
    ) {
        let target = frac * if k == 1 { 0.5 } else { crowdrate::kic::spammer_error_prob(k).unwrap() };
        let RateBound::Feasible(r) = kic_rate_threshold(k, q, target).unwrap() else {
            return Err(TestCaseError::fail("unexpected infeasible"));
        };
        prop_assert!(r > 0.0);
        prop_assert!((kic_error_at_rate(k, q, r).unwrap() - target).abs() < 1e-9);
    }

    #[test]
    fn price_rule_is_scale_equivariant(k1 in 2usize..20, k2 in 2usize..20, p in 0.001f64..100.0) {
        let a = price_threshold(k1, k2, p).unwrap();
        let b = price_threshold(k1, k2, 2.0 * p).unwrap();
        prop_assert!((b - 2.0 * a).abs() <= 1e-12 * b.abs());
    }

    #[test]
    fn exact_price_identity_on_equal_arity(k in 2usize..20, q in 0.05f64..0.95, p in 0.001f64..10.0) {
        prop_assert_eq!(price_threshold_exact(k, k, q, 0.01, p).unwrap(), p);
    }
}

#[test]
fn point_mass_populations_give_equal_bounds() {
    for eps in [0.0, 0.05, 0.2, 0.4] {
        for m in 2..=8 {
            let pop = SkillPopulation::single(eps).unwrap();
            let q = BoundQuery::new(SourceModel::uniform(3).unwrap(), m, pop, 0.1).unwrap();
            assert_eq!(rmin_sl_cs(&q).unwrap(), rmin_sl_uk(&q).unwrap());
        }
    }
}
