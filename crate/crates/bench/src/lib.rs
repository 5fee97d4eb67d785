//! Shared systems for the benchmarks in `benches/`.

use betaflow::input::parse_params;
use betaflow::Params;

pub const QUARTIC: (&str, &str) = ("poly:-1,-1,-1,0,1", "expr:1-b^2/(b+1)");
pub const QUINTIC: (&str, &str) = ("poly:1,1,-2,-1,-1,1", "0");
pub const GOLDEN: (&str, &str) = ("poly:-1,-1,1", "0");

pub fn system((beta, alpha): (&str, &str)) -> Params {
    parse_params(beta, alpha, 64).expect("benchmark system")
}
