use std::io::Write;

use super::solve::EigenPair;
use crate::{Result, C64};

/// `index,re_kappa,im_kappa,residual`
pub fn write_eigenvalues_csv(pairs: &[EigenPair], out: &mut impl Write) -> Result<()> {
    writeln!(out, "index,re_kappa,im_kappa,residual")?;
    for (i, p) in pairs.iter().enumerate() {
        writeln!(out, "{},{:.9},{:.9},{:.3e}", i, p.kappa.re, p.kappa.im, p.residual)?;
    }
    Ok(())
}

/// `node_index,re,im`
pub fn write_field_csv(field: &[C64], out: &mut impl Write) -> Result<()> {
    writeln!(out, "node_index,re,im")?;
    for (i, c) in field.iter().enumerate() {
        writeln!(out, "{},{:e},{:e}", i, c.re, c.im)?;
    }
    Ok(())
}
