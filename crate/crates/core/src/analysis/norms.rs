use crate::grid::StaggeredGrid;

/// The Lebesgue exponents tracked by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::Linf];

    pub fn exponent(self) -> f64 {
        match self {
            Norm::L1 => 1.0,
            Norm::L2 => 2.0,
            Norm::Linf => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Norm::L1 => "L1",
            Norm::L2 => "L2",
            Norm::Linf => "Linf",
        })
    }
}

/// Midpoint-rule `L^p` norm of a cell field.
pub fn lp_norm(c: &[f64], grid: &StaggeredGrid, p: Norm) -> f64 {
    let w = grid.cell_measure();
    match p {
        Norm::L1 => c.iter().map(|x| x.abs()).sum::<f64>() * w,
        Norm::L2 => (c.iter().map(|x| x * x).sum::<f64>() * w).sqrt(),
        Norm::Linf => c.iter().fold(0.0, |m: f64, x| m.max(x.abs())),
    }
}

/// `M = integral of c` (signed).
pub fn mass(c: &[f64], grid: &StaggeredGrid) -> f64 {
    c.iter().sum::<f64>() * grid.cell_measure()
}

/// `C_p = ||c0||_1^{1/p} ||c0||_inf^{1 - 1/p}` from the two endpoint norms.
pub fn interpolation_constant_from(l1: f64, linf: f64, p: f64) -> f64 {
    if p == 1.0 {
        l1
    } else if p.is_infinite() {
        linf
    } else {
        l1.powf(1.0 / p) * linf.powf(1.0 - 1.0 / p)
    }
}

/// `C_p` for an initial field, `p` in `[1, inf]`.
pub fn interpolation_constant(c0: &[f64], grid: &StaggeredGrid, p: f64) -> f64 {
    interpolation_constant_from(
        lp_norm(c0, grid, Norm::L1),
        lp_norm(c0, grid, Norm::Linf),
        p,
    )
}
