//! Payoff bookkeeping and buy decisions across random consumers.

use proptest::prelude::*;

use pwyw::game::{decide, effective_reference_price, BehaviorMode, FsSettings};
use pwyw::preferences::{ConsumerProfile, CostType, SupplierProfile};

fn consumer() -> impl Strategy<Value = ConsumerProfile> {
    (
        0.0f64..20.0,
        0.0f64..0.95,
        0.0f64..2.0,
        0.0f64..2.0,
        0.01f64..=1.0,
        proptest::bool::weighted(0.1),
    )
        .prop_map(|(v, beta, extra, gamma, lambda, free)| {
            ConsumerProfile::new(v, beta + extra, beta, gamma, lambda, free).unwrap()
        })
}

fn mode() -> impl Strategy<Value = BehaviorMode> {
    prop_oneof![
        (0.05f64..0.95).prop_map(|f| BehaviorMode::literal(f).unwrap()),
        Just(BehaviorMode::FsModel(FsSettings::default())),
    ]
}

fn cost_type() -> impl Strategy<Value = CostType> {
    prop_oneof![Just(CostType::Recoverable), Just(CostType::Sunk)]
}

proptest! {
    #[test]
    fn payoffs_follow_the_game_tree(
        consumer in consumer(),
        mode in mode(),
        cost_type in cost_type(),
        cost in 0.0f64..15.0,
        erp in proptest::option::of(0.0f64..25.0),
        reveal in any::<bool>(),
    ) {
        let supplier = SupplierProfile::new(cost, cost_type, erp, reveal).unwrap();
        let o = decide(&consumer, &supplier, &mode);
        match o.price {
            Some(p) => {
                prop_assert!(o.bought);
                prop_assert!((0.0..=consumer.v()).contains(&p));
                prop_assert_eq!(o.consumer_payoff, consumer.v() - p);
                prop_assert_eq!(o.supplier_payoff, p - cost);
            }
            None => {
                prop_assert!(!o.bought);
                prop_assert!(!consumer.is_free_rider());
                let expected = match cost_type {
                    CostType::Recoverable => 0.0,
                    CostType::Sunk => -cost,
                };
                prop_assert_eq!(o.supplier_payoff, expected);
            }
        }
        if consumer.is_free_rider() {
            prop_assert_eq!(o.price, Some(0.0));
        }
    }

    #[test]
    fn showing_a_reference_price_only_removes_buyers(
        consumer in consumer(), mode in mode(), cost in 0.0f64..15.0, erp in 0.0f64..25.0,
    ) {
        let hidden = SupplierProfile::new(cost, CostType::Sunk, None, false).unwrap();
        let shown = SupplierProfile::new(cost, CostType::Sunk, Some(erp), false).unwrap();
        if decide(&consumer, &shown, &mode).bought {
            prop_assert!(decide(&consumer, &hidden, &mode).bought);
        }
    }

    #[test]
    fn revealed_buyers_shrink_as_cost_rises(
        consumer in consumer(), mode in mode(), cost_type in cost_type(), c1 in 0.0f64..15.0, bump in 0.0f64..10.0,
    ) {
        let low = SupplierProfile::new(c1, cost_type, None, true).unwrap();
        let high = SupplierProfile::new(c1 + bump, cost_type, None, true).unwrap();
        if decide(&consumer, &high, &mode).bought {
            prop_assert!(decide(&consumer, &low, &mode).bought);
        }
    }

    #[test]
    fn reference_price_is_capped_by_valuation(consumer in consumer(), erp in proptest::option::of(0.0f64..25.0)) {
        let supplier = SupplierProfile::new(4.0, CostType::Recoverable, erp, false).unwrap();
        let p_r = effective_reference_price(&consumer, &supplier);
        prop_assert!(p_r <= consumer.v());
        prop_assert!(p_r <= erp.unwrap_or(f64::INFINITY));
        prop_assert!(p_r == consumer.v() || Some(p_r) == erp);
    }
}
