use complex_germ::moyal::{parse, print, star, OmegaConvention};

use crate::error::{CliError, CliResult};

/// Parse two symbols and return the canonical text of their star product.
pub fn star_text(left: &str, right: &str, conv: OmegaConvention) -> CliResult<String> {
    let f = parse(left).map_err(|e| CliError::Config(format!("first operand: {e}")))?;
    let g = parse(right).map_err(|e| CliError::Config(format!("second operand: {e}")))?;
    let n = f.n().max(g.n());
    let f = f.with_dim(n)?;
    let g = g.with_dim(n)?;
    Ok(print(&star(&f, &g, conv)?))
}

pub fn run(left: &str, right: &str, conv: OmegaConvention) -> CliResult<()> {
    println!("{}", star_text(left, right, conv)?);
    Ok(())
}
