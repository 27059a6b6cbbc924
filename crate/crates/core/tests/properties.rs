use apkin_core::constants::heavy_tail_symbol;
use apkin_core::duhamel::{duhamel_step, CoefficientTable, HistoryBuffer, Kernel, Truncation};
use apkin_core::equilibrium::{discrete_moment, make_equilibrium, Equilibrium, EquilibriumKind};
use apkin_core::grid::{SpatialGrid, VelocityGrid};
use apkin_core::harness::relative_error;
use apkin_core::implicit::{isa_step, isd_step, ImplicitState};
use apkin_core::limit::{limit_step, LimitConfig};
use apkin_core::micromacro::{mmsa_step, mmsd_step, MicroMacro, MicroMacroState, Stencil};
use apkin_core::spectral::{initial_condition, initial_density, to_spectral, SpectralPhaseSpace, Transform};
use apkin_core::tail::TailQuadrature;
use apkin_core::C64;
use proptest::prelude::*;

fn heavy(beta: f64, vmax: f64, nv: usize) -> Equilibrium {
    make_equilibrium(EquilibriumKind::HeavyTail, beta, &VelocityGrid::midpoint(vmax, nv).unwrap()).unwrap()
}

fn gaussian(nv: usize) -> Equilibrium {
    make_equilibrium(EquilibriumKind::Gaussian, 2.0, &VelocityGrid::midpoint(10.0, nv).unwrap()).unwrap()
}

fn even_len() -> impl Strategy<Value = usize> {
    (2usize..40).prop_map(|h| 2 * h)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn transform_round_trip(values in even_len().prop_flat_map(|n| prop::collection::vec(-10.0f64..10.0, n))) {
        let t = Transform::new(values.len());
        let back = t.inverse(&t.forward(&values).unwrap()).unwrap();
        for (a, b) in values.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn real_data_is_hermitian(values in even_len().prop_flat_map(|n| prop::collection::vec(-10.0f64..10.0, n))) {
        let rho = to_spectral(&values).unwrap();
        prop_assert!(rho.hermitian_defect() < 1e-12);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        prop_assert!((rho.amps[0].re - mean).abs() < 1e-12);
    }

    #[test]
    fn velocity_reduction_commutes_with_transform(
        nv in 1usize..6,
        seed in prop::collection::vec(-1.0f64..1.0, 16 * 12),
    ) {
        let (nx, nv) = (16, 2 * nv);
        let grid = VelocityGrid::midpoint(3.0, nv).unwrap();
        let t = Transform::new(nx);
        // f(x_j, v_i) = seed[i * nx + j]
        let mut f_hat = SpectralPhaseSpace::zeros(nx, nv);
        for i in 0..nv {
            let col = t.forward(&seed[i * nx..(i + 1) * nx]).unwrap();
            for k in 0..nx {
                f_hat.mode_mut(k)[i] = col.amps[k];
            }
        }
        let reduced: Vec<f64> = (0..nx).map(|j| (0..nv).map(|i| grid.weights[i] * seed[i * nx + j]).sum()).collect();
        let lhs = f_hat.density(&grid.weights);
        let rhs = t.forward(&reduced).unwrap();
        for (a, b) in lhs.amps.iter().zip(&rhs.amps) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn equilibrium_moments(beta in 1.3f64..2.9, vmax in 5.0f64..80.0, half in 5usize..150) {
        let eq = heavy(beta, vmax, 2 * half);
        prop_assert!((discrete_moment(&eq, 0) - 1.0).abs() < 1e-15);
        prop_assert!(discrete_moment(&eq, 1).abs() < 1e-15);
        let g = gaussian(2 * half);
        prop_assert!((discrete_moment(&g, 0) - 1.0).abs() < 1e-15);
        prop_assert!(discrete_moment(&g, 1).abs() < 1e-15);
    }

    #[test]
    fn symbol_is_hermitian_in_k(eps in 1e-4f64..1.0, s in 0.0f64..3.0, k in 0.1f64..20.0) {
        let eq = heavy(2.5, 50.0, 200);
        let a = heavy_tail_symbol(eps, s, k, &eq).unwrap();
        let b = heavy_tail_symbol(eps, s, -k, &eq).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-14);
        prop_assert_eq!(heavy_tail_symbol(eps, s, 0.0, &eq).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn implicit_steps_conserve_mass_and_symmetry(leps in -8.0f64..0.0, ldt in -4.0f64..-1.0, anomalous: bool) {
        let (eps, dt) = (10f64.powf(leps), 10f64.powf(ldt));
        let sgrid = SpatialGrid::new(1.0, 32).unwrap();
        let eq = if anomalous { heavy(2.5, 50.0, 200) } else { gaussian(20) };
        let alpha = if anomalous { 1.5 } else { 2.0 };
        let tail = anomalous.then(|| TailQuadrature::from_equilibrium(&eq).unwrap());
        let mut st = ImplicitState::new(initial_condition(&sgrid, &eq), eq.weights(), eps, dt, alpha).unwrap();
        for _ in 0..20 {
            match &tail {
                Some(t) => isa_step(&mut st, &sgrid, &eq, t),
                None => isd_step(&mut st, &sgrid, &eq),
            }
        }
        prop_assert!((st.rho.amps[0] - C64::new(1.0, 0.0)).norm() < 1e-13);
        prop_assert!(st.rho.hermitian_defect() < 1e-12);
        // ISA's density carries the tail correction, which the truncated f does not see.
        if !anomalous {
            let density = st.f.density(eq.weights());
            for (a, b) in density.amps.iter().zip(&st.rho.amps) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn micro_macro_keeps_zero_mean_g(leps in -6.0f64..0.0, anomalous: bool) {
        let eps = 10f64.powf(leps);
        let sgrid = SpatialGrid::new(1.0, 32).unwrap();
        let eq = if anomalous { heavy(2.5, 50.0, 200) } else { gaussian(20) };
        let alpha = if anomalous { 1.5 } else { 2.0 };
        let tail = anomalous.then(|| TailQuadrature::from_equilibrium(&eq).unwrap());
        let mm = MicroMacro::new(sgrid.clone(), eq.clone(), Stencil::Upwind1);
        let vmax = eq.nodes().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let bound = apkin_core::micromacro::cfl_max_dt(eps, alpha, sgrid.dx(), vmax, Stencil::Upwind1);
        let dt = bound.min(1e-3);
        let mut st = MicroMacroState::new(initial_density(&sgrid), eq.len(), eps, dt, alpha).unwrap();
        let mass0: f64 = st.rho.iter().sum();
        for _ in 0..20 {
            match &tail {
                Some(t) => mmsa_step(&mut st, &mm, t),
                None => mmsd_step(&mut st, &mm),
            }
            prop_assert!(st.max_g_mean(eq.weights()) < 1e-11);
        }
        let mass: f64 = st.rho.iter().sum();
        prop_assert!((mass - mass0).abs() < 1e-12 * mass0);
    }

    #[test]
    fn partition_invariant(leps in -6.0f64..0.0, ldt in -3.0f64..-2.0, anomalous: bool) {
        let (eps, dt) = (10f64.powf(leps), 10f64.powf(ldt));
        let sgrid = SpatialGrid::new(1.0, 8).unwrap();
        let eq = if anomalous { heavy(2.5, 50.0, 200) } else { gaussian(20) };
        let tail = TailQuadrature::from_equilibrium(&heavy(2.5, 50.0, 200)).unwrap();
        let kernel = if anomalous { Kernel::Anomalous(&tail) } else { Kernel::Diffusion(&eq, 2.0) };
        let table = CoefficientTable::build(kernel, &sgrid, eps, dt, 60);
        prop_assert!(table.partition_residual() < 1e-12);
    }

    #[test]
    fn duhamel_conserves_mass(leps in -6.0f64..0.0) {
        let eps = 10f64.powf(leps);
        let sgrid = SpatialGrid::new(1.0, 16).unwrap();
        let eq = heavy(2.5, 50.0, 200);
        let tail = TailQuadrature::from_equilibrium(&eq).unwrap();
        let table = CoefficientTable::build(Kernel::Anomalous(&tail), &sgrid, eps, 1e-2, 10);
        let mut hist = HistoryBuffer::new(initial_condition(&sgrid, &eq), eq.weights());
        for n in 0..10 {
            duhamel_step(&mut hist, &table, n, &sgrid, &eq, Truncation::Off).unwrap();
            prop_assert!((hist.latest().amps[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
            prop_assert!(hist.latest().hermitian_defect() < 1e-12);
        }
    }

    #[test]
    fn limit_steps_contract(ldt in -5.0f64..0.0, anomalous: bool) {
        let dt = 10f64.powf(ldt);
        let sgrid = SpatialGrid::new(1.0, 32).unwrap();
        let cfg = if anomalous {
            LimitConfig::ads(&TailQuadrature::from_equilibrium(&heavy(2.5, 50.0, 200)).unwrap(), dt)
        } else {
            LimitConfig::ds(&gaussian(20), dt)
        };
        let values: Vec<f64> = sgrid.nodes().iter().map(|x| 1.0 + x.cos() + (3.0 * x).sin()).collect();
        let mut rho = to_spectral(&values).unwrap();
        let before = rho.clone();
        limit_step(&mut rho, &sgrid, &cfg);
        prop_assert_eq!(rho.amps[0], before.amps[0]);
        for (a, b) in rho.amps.iter().zip(&before.amps).skip(1) {
            prop_assert!(a.norm() < b.norm() || b.norm() == 0.0);
        }
    }

    #[test]
    fn relative_error_scales(c in -3.0f64..3.0, values in prop::collection::vec(0.5f64..2.0, 8..40)) {
        let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
        let e = relative_error(&values, &scaled).unwrap();
        prop_assert!((e - (1.0 - c).abs()).abs() < 1e-12);
    }
}
