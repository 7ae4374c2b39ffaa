use std::sync::Arc;

use kcmlab_core::bootstrap::closure;
use kcmlab_core::droplets::{desk_schedule, DirectionFrame, Droplet, ScheduleOverrides, Tube};
use kcmlab_core::events::{has_w_helping, View};
use kcmlab_core::family::zoo;
use kcmlab_core::io::{decode_grid, encode_grid};
use kcmlab_core::kcm::ExactSystem;
use kcmlab_core::lattice::{BoundaryCondition, Configuration, Site, Window};
use proptest::prelude::*;

fn grid(n: i64) -> Window {
    Window::new(0, n - 1, 0, n - 1).unwrap()
}

fn config(n: i64, cells: Vec<bool>) -> Configuration {
    Configuration::from_cells(grid(n), cells, BoundaryCondition::AllHealthy).unwrap()
}

fn family_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["fa2f", "duarte", "east", "anisotropic", "one_neighbour"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_monotone_and_idempotent(
        name in family_name(),
        a in prop::collection::vec(any::<bool>(), 64),
        extra in prop::collection::vec(any::<bool>(), 64),
    ) {
        let f = zoo::get(name).unwrap();
        let small = config(8, a.clone());
        let big = config(8, a.iter().zip(&extra).map(|(x, y)| *x || *y).collect());
        let cs = closure(&f, &small).unwrap().final_config;
        let cb = closure(&f, &big).unwrap().final_config;
        prop_assert!(cb.contains(&cs));
        prop_assert!(cs.contains(&small));
        let again = closure(&f, &cs).unwrap();
        prop_assert!(again.newly_infected.is_empty());
    }

    #[test]
    fn closure_commutes_with_shifts(
        name in family_name(),
        cells in prop::collection::vec(any::<bool>(), 64),
        dx in -30i64..30,
        dy in -30i64..30,
    ) {
        let f = zoo::get(name).unwrap();
        let c = config(8, cells);
        let x = Site::new(dx, dy);
        let moved = Configuration::from_sites(
            c.window().translate(x),
            BoundaryCondition::AllHealthy,
            c.infected_sites().into_iter().map(|s| s + x),
        ).unwrap();
        let a: Vec<Site> = closure(&f, &c).unwrap().final_config.infected_sites().into_iter().map(|s| s + x).collect();
        let b = closure(&f, &moved).unwrap().final_config.infected_sites();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn schedule_levels_grow(q in 0.02f64..0.6, alpha in 1u64..4, w in 2u64..5) {
        let s = desk_schedule(q, alpha, w, ScheduleOverrides { w: Some(w), ..Default::default() }).unwrap();
        prop_assert!(s.levels.windows(2).all(|p| p[1] > p[0]));
        for n in s.n_c..s.levels.len().saturating_sub(1) {
            prop_assert!(s.levels[n + 1] >= w * s.levels[n], "level {} -> {}", s.levels[n], s.levels[n + 1]);
        }
        prop_assert!((w as f64).powi(s.n_c as i32) >= q.powf(-(alpha as f64)));
    }

    #[test]
    fn tubes_are_outer_minus_base(
        radii in prop::collection::vec(0i64..4, 8),
        i in 0usize..8,
        steps in 1i64..5,
    ) {
        let frame = Arc::new(DirectionFrame::octagonal());
        let base = Droplet::from_integer_radii(frame.clone(), &radii).unwrap();
        let tube = Tube::new(base.clone(), i, steps).unwrap();
        let outer = tube.outer();
        prop_assert!(base.points().iter().all(|&x| outer.contains(x)));
        let pts = tube.points();
        prop_assert_eq!(pts.len() + base.points().len(), outer.points().len());
        for seg in tube.all_segments() {
            prop_assert!(seg.sites.iter().all(|&x| tube.contains(x)));
            let u = frame.directions[seg.direction];
            prop_assert!(seg.sites.iter().all(|&x| u.dot(x) == seg.line));
        }
    }

    #[test]
    fn w_helping_monotone_in_w(cells in prop::collection::vec(any::<bool>(), 30), w in 1usize..5) {
        let c = Configuration::from_cells(Window::new(0, 29, 0, 0).unwrap(), cells, BoundaryCondition::AllHealthy).unwrap();
        let seg = kcmlab_core::droplets::Segment {
            direction: 1,
            line: 0,
            m: 0.into(),
            lateral: (0, 29),
            sites: (0..30).map(|x| Site::new(x, 0)).collect(),
        };
        let v = View::whole(&c);
        prop_assert!(!has_w_helping(&v, &seg, w + 1, 0) || has_w_helping(&v, &seg, w, 0));
        prop_assert!(!has_w_helping(&v, &seg, w, 1) || has_w_helping(&v, &seg, w, 0));
    }

    #[test]
    fn grid_text_round_trips(cells in prop::collection::vec(any::<bool>(), 35)) {
        let c = Configuration::from_cells(Window::new(-2, 4, 3, 7).unwrap(), cells, BoundaryCondition::AllHealthy).unwrap();
        let back = decode_grid(&encode_grid(&c), BoundaryCondition::AllHealthy).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn stationary_law_balances_on_small_windows() {
    for (name, w) in [("fa2f", Window::new(0, 2, 0, 1).unwrap()), ("duarte", Window::new(0, 1, 0, 2).unwrap())] {
        let sys = ExactSystem::new(&zoo::get(name).unwrap(), w, BoundaryCondition::AllInfected, 0.35).unwrap();
        let (class, pi) = sys.stationary_on_class(0).unwrap();
        assert!(sys.balance_residual(&class, &pi) < 1e-10);
        // product measure restricted to the class
        let z: f64 = class.iter().map(|&s| sys.mu(s)).sum();
        for (&s, &p) in class.iter().zip(&pi) {
            assert!((p - sys.mu(s) / z).abs() < 1e-9);
        }
    }
}
