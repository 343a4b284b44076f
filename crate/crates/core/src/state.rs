use crate::config::{InitialConcentration, InitialVelocity, SimConfig};
use crate::error::ConfigError;
use crate::grid::StaggeredGrid;

/// Velocity, pressure and concentration at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    /// x-velocity on u-faces.
    pub u: Vec<f64>,
    /// y-velocity on v-faces.
    pub v: Vec<f64>,
    /// Cell-centered pressure (projection multiplier).
    pub p: Vec<f64>,
    /// Cell-centered concentration.
    pub c: Vec<f64>,
    pub t: f64,
}

impl State {
    pub fn zeros(grid: &StaggeredGrid) -> Self {
        State {
            u: vec![0.0; grid.u_count()],
            v: vec![0.0; grid.v_count()],
            p: vec![0.0; grid.cell_count()],
            c: vec![0.0; grid.cell_count()],
            t: 0.0,
        }
    }

    /// Name of the first field holding a NaN or infinity.
    pub fn non_finite_field(&self) -> Option<&'static str> {
        let fields: [(&'static str, &[f64]); 4] = [
            ("u", &self.u),
            ("v", &self.v),
            ("p", &self.p),
            ("c", &self.c),
        ];
        fields
            .into_iter()
            .find(|(_, data)| data.iter().any(|x| !x.is_finite()))
            .map(|(name, _)| name)
    }

    pub fn is_finite(&self) -> bool {
        self.non_finite_field().is_none() && self.t.is_finite()
    }
}

/// Zeroes the wall-normal velocity on every boundary face.
pub fn enforce_no_slip(grid: &StaggeredGrid, u: &mut [f64], v: &mut [f64]) {
    for j in 0..grid.ny {
        u[grid.u_face(0, j)] = 0.0;
        u[grid.u_face(grid.nx, j)] = 0.0;
    }
    for i in 0..grid.nx {
        v[grid.v_face(i, 0)] = 0.0;
        v[grid.v_face(i, grid.ny)] = 0.0;
    }
}

/// Builds the initial state. Boundary faces are forced to zero and the
/// pressure starts at zero.
pub fn init_state(config: &SimConfig, grid: &StaggeredGrid) -> Result<State, ConfigError> {
    let mut state = State::zeros(grid);

    match &config.initial_velocity {
        InitialVelocity::Constant(ux, uy) => {
            state.u.fill(*ux);
            state.v.fill(*uy);
        }
        InitialVelocity::PerFace { u, v } => {
            if u.len() != grid.u_count() || v.len() != grid.v_count() {
                return Err(ConfigError::constraint(format!(
                    "initial velocity needs {} u-faces and {} v-faces, got {} and {}",
                    grid.u_count(),
                    grid.v_count(),
                    u.len(),
                    v.len()
                )));
            }
            state.u.copy_from_slice(u);
            state.v.copy_from_slice(v);
        }
    }
    enforce_no_slip(grid, &mut state.u, &mut state.v);

    match &config.initial_concentration {
        InitialConcentration::Constant(value) => state.c.fill(*value),
        InitialConcentration::Step { value, x_lo, x_hi } => {
            state.c = grid.sample_cells(|x, _| if *x_lo <= x && x < *x_hi { *value } else { 0.0 });
        }
        InitialConcentration::PerCell(values) => {
            if values.len() != grid.cell_count() {
                return Err(ConfigError::constraint(format!(
                    "initial concentration has {} values, grid has {} cells",
                    values.len(),
                    grid.cell_count()
                )));
            }
            state.c.copy_from_slice(values);
        }
    }
    Ok(state)
}
