//! Named configurations for every geometry, κ and mode combination of the
//! reference experiments. Mesh size and output directory keep their defaults.

use cloaksim_core::geometry::GeometrySpec;
use cloaksim_core::scatter::MediumMode;
use cloaksim_core::CavityBc;

use crate::config::{GeometryConfig, RunConfig, Selection};
use crate::{Error, Result};

pub const PRESETS: [&str; 17] = [
    "table1", "table2", "table3", "table4", "table5", "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
    "fig9", "fig10", "fig11", "fig12",
];

/// Applies the preset `name` on top of `base`.
pub fn apply(name: &str, base: &RunConfig) -> Result<RunConfig> {
    use CavityBc::{Dirichlet as D, Neumann as N};
    use MediumMode::*;
    let mut c = base.clone();
    let (circle, ellipse, square) = (GeometrySpec::circle(), GeometrySpec::ellipse(), GeometrySpec::square());
    let ite = |c: &mut RunConfig, g: &GeometrySpec, bc: CavityBc, sel: Selection, target: f64, count: usize| {
        c.geometry = GeometryConfig::from_spec(g);
        c.ite.cavity_bc = bc;
        c.ite.selection = sel;
        c.ite.target = target;
        c.ite.count = count;
        c.scatter.modes.clear();
        c.scatter.kappa = None;
    };
    let cloak = |c: &mut RunConfig, g: &GeometrySpec, bc: CavityBc, mode: MediumMode, kappa: f64| {
        c.geometry = GeometryConfig::from_spec(g);
        c.ite.cavity_bc = bc;
        c.ite.selection = Selection::Auto;
        c.ite.target = kappa;
        c.ite.count = 1;
        c.scatter.modes = vec![mode];
        c.scatter.kappa = Some(kappa);
    };
    match name {
        "table1" => ite(&mut c, &circle, D, Selection::Near, 1.0, 5),
        "table2" => ite(&mut c, &circle, D, Selection::ComplexNear, 2.5, 2),
        "table3" => ite(&mut c, &circle, N, Selection::Smallest, 1.0, 5),
        // Dirichlet: six closest to 2; `--bc neumann` gives the six smallest.
        "table4" => ite(&mut c, &ellipse, D, Selection::Auto, 2.0, 6),
        "table5" => ite(&mut c, &square, D, Selection::Auto, 2.0, 6),
        "fig1" => cloak(&mut c, &circle, D, IdealizedDirichlet, 0.354349),
        "fig2" => cloak(&mut c, &circle, D, IdealizedDirichlet, 3.028932),
        "fig3" => cloak(&mut c, &circle, D, IdealizedDirichlet, 3.857263),
        "fig4" => cloak(&mut c, &circle, N, IdealizedNeumann, 1.890939),
        "fig5" => cloak(&mut c, &ellipse, D, IdealizedDirichlet, 2.097681),
        "fig6" => cloak(&mut c, &ellipse, N, IdealizedNeumann, 1.747153),
        "fig7" => cloak(&mut c, &square, D, IdealizedDirichlet, 2.431338),
        "fig8" => cloak(&mut c, &square, N, IdealizedNeumann, 0.761138),
        "fig9" => cloak(&mut c, &circle, D, Lossy1, 3.857263),
        "fig10" => cloak(&mut c, &circle, N, Lossy2, 1.890939),
        "fig11" => cloak(&mut c, &ellipse, D, Lossy1, 2.097681),
        "fig12" => cloak(&mut c, &ellipse, N, Lossy2, 1.747153),
        _ => {
            return Err(Error::Config(format!("unknown preset '{name}', expected one of {}", PRESETS.join(", "))));
        }
    }
    Ok(c)
}
