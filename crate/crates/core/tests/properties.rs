use dfb_core::analysis::{interpolation_constant, lp_norm, Norm};
use dfb_core::grid::StaggeredGrid;
use dfb_core::momentum::{kinetic_energy, momentum_step, MomentumParams};
use dfb_core::runner::{format_series, read_series, run_simulation, write_series};
use dfb_core::state::{enforce_no_slip, State};
use dfb_core::transport::{stable_dt, transport_step, TransportParams};
use dfb_core::{
    InitialConcentration, InitialVelocity, NormRecord, NormSeries, ScalarField, SimConfig,
    VectorField,
};
use proptest::prelude::*;

fn grid_and_field() -> impl Strategy<Value = (StaggeredGrid, Vec<f64>)> {
    (2usize..12, 2usize..12, 0.5f64..20.0, 0.5f64..20.0).prop_flat_map(|(nx, ny, lx, ly)| {
        let g = StaggeredGrid::new(lx, ly, nx, ny).unwrap();
        (Just(g), prop::collection::vec(0.0f64..2.0, nx * ny))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interpolation_inequality((g, c) in grid_and_field(), p in 1.0f64..8.0) {
        let l1 = lp_norm(&c, &g, Norm::L1);
        let linf = lp_norm(&c, &g, Norm::Linf);
        let lp: f64 = (c.iter().map(|x| x.powf(p)).sum::<f64>() * g.cell_measure()).powf(1.0 / p);
        prop_assert!(lp <= interpolation_constant(&c, &g, p) * (1.0 + 1e-12) + 1e-300);
        // ||c||_2 <= sqrt(||c||_1 ||c||_inf)
        prop_assert!(lp_norm(&c, &g, Norm::L2) <= (l1 * linf).sqrt() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn norm_chain((g, c) in grid_and_field()) {
        // on a domain of measure m: ||c||_1 <= sqrt(m) ||c||_2 <= m ||c||_inf
        let m = g.measure();
        let (l1, l2, linf) = (lp_norm(&c, &g, Norm::L1), lp_norm(&c, &g, Norm::L2), lp_norm(&c, &g, Norm::Linf));
        prop_assert!(l1 <= m.sqrt() * l2 * (1.0 + 1e-12));
        prop_assert!(l2 <= m.sqrt() * linf * (1.0 + 1e-12));
    }

    #[test]
    fn transport_step_keeps_bounds(
        (g, raw) in grid_and_field(),
        m0 in 0.05f64..0.99,
        kappa in 0.001f64..0.1,
        speed in 0.0f64..2.0,
        seed in 0u64..1000,
    ) {
        let c: Vec<f64> = raw.iter().map(|x| x / 2.0 * m0).collect();
        let peak = c.iter().copied().fold(0.0, f64::max);
        // a solenoidal field from a random stream function vanishing on the walls
        let phase = seed as f64 * 0.37;
        let psi = |x: f64, y: f64| {
            use std::f64::consts::PI;
            speed * g.lx * (PI * x / g.lx).sin() * (PI * y / g.ly).sin() * (3.0 * x / g.lx + phase).cos()
        };
        let mut state = State::zeros(&g);
        for j in 0..g.ny {
            for i in 0..=g.nx {
                let x = i as f64 * g.hx;
                state.u[g.u_face(i, j)] = (psi(x, (j + 1) as f64 * g.hy) - psi(x, j as f64 * g.hy)) / g.hy;
            }
        }
        for j in 0..=g.ny {
            for i in 0..g.nx {
                let y = j as f64 * g.hy;
                state.v[g.v_face(i, j)] = -(psi((i + 1) as f64 * g.hx, y) - psi(i as f64 * g.hx, y)) / g.hx;
            }
        }
        enforce_no_slip(&g, &mut state.u, &mut state.v);
        state.c = c;
        let kappa = ScalarField::Constant(kappa);
        let dt = stable_dt(&g, &state, 0.05, 1.0);
        let params = TransportParams { diffusion: 0.05, reaction_rate: &kappa, dt };
        let mut s = state;
        for _ in 0..5 {
            s = transport_step(&s, &g, &params).unwrap();
            let lo = s.c.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = s.c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo >= -1e-12, "min {lo}");
            prop_assert!(hi <= peak + 1e-12, "max {hi} above {peak}");
        }
    }

    #[test]
    fn momentum_without_forcing_dissipates(
        nx in 3usize..14,
        ny in 3usize..14,
        seed in prop::collection::vec(-1.0f64..1.0, 400),
        conc in 0.0f64..1.5,
        beta in 0.0f64..3.0,
        mu_e in 0.01f64..3.0,
        k in 0.05f64..20.0,
    ) {
        let g = StaggeredGrid::new(nx as f64, ny as f64 * 0.7, nx, ny).unwrap();
        let mut s = State::zeros(&g);
        for (k, u) in s.u.iter_mut().enumerate() {
            *u = seed[k % seed.len()];
        }
        for (k, v) in s.v.iter_mut().enumerate() {
            *v = seed[(k * 7 + 3) % seed.len()];
        }
        s.c.fill(conc);
        enforce_no_slip(&g, &mut s.u, &mut s.v);
        let beta = ScalarField::Constant(beta);
        let params = MomentumParams {
            permeability: k,
            forchheimer: &beta,
            effective_viscosity: mu_e,
            viscosity_contrast: 1.0,
            truncation: None,
            forcing: &VectorField::Zero,
            dt: stable_dt(&g, &s, 0.01, mu_e),
        };
        let mut energy = kinetic_energy(&s.u, &s.v, &g);
        for _ in 0..5 {
            let (next, _) = momentum_step(&s, &g, &params, 1e-10).unwrap();
            let e = kinetic_energy(&next.u, &next.v, &g);
            prop_assert!(e <= energy, "{e} > {energy}");
            energy = e;
            s = next;
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(values in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 8..64)) {
        let series: NormSeries = values
            .chunks_exact(8)
            .enumerate()
            .map(|(k, v)| NormRecord {
                t: k as f64,
                l1: v[0],
                l2: v[1],
                linf: v[2],
                mass: v[3],
                u_l2: v[4],
                div_residual: v[5],
                lambda_num: (k % 2 == 0).then_some(v[6]),
                c_min: v[7],
            })
            .collect::<Result<_, _>>()
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_series(&series, &path).unwrap();
        let back = read_series(&path).unwrap();
        prop_assert_eq!(back.len(), series.len());
        for (a, b) in series.records().iter().zip(back.records()) {
            let bits = |r: &NormRecord| {
                [r.t, r.l1, r.l2, r.linf, r.mass, r.u_l2, r.div_residual, r.lambda_num.unwrap_or(0.5), r.c_min]
                    .map(f64::to_bits)
            };
            prop_assert_eq!(bits(a), bits(b));
            prop_assert_eq!(a.lambda_num.is_some(), b.lambda_num.is_some());
        }
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let config = SimConfig {
        domain_extent: (80.0, 40.0),
        resolution: (24, 12),
        end_time: 60.0,
        initial_velocity: InitialVelocity::Constant(0.2, 0.05),
        initial_concentration: InitialConcentration::Step {
            value: 0.7,
            x_lo: 10.0,
            x_hi: 30.0,
        },
        ..SimConfig::reference()
    };
    let a = format_series(&run_simulation(&config).unwrap().series);
    let b = format_series(&run_simulation(&config).unwrap().series);
    assert_eq!(a, b);
    assert!(a.lines().count() > 60);
}
