//! The cascade: exact criteria first, then the window thresholds over a grid.

use num_bigint::BigUint;

use super::bounds::{check_cota, check_n7_instance, check_tu};
use super::direct::{check_caseall, check_direct, check_sieve, SieveChoice};
use super::{Criterion, CriterionReport, ProblemInstance, Verdict};
use crate::error::{Error, Result};

/// Window exponents tried by [`check_auto`].
pub const T_GRID: [&str; 13] = ["5", "5.4", "6", "6.3", "6.6", "6.8", "7", "7.4", "7.5", "8.2", "8.5", "10", "15.6"];
/// Second-window widths; `0` selects the single-window criterion.
pub const U_GRID: [&str; 3] = ["0", "7", "9.5"];

fn soften(criterion: Criterion, inst: &ProblemInstance, r: Result<CriterionReport>) -> Result<CriterionReport> {
    match r {
        Err(Error::PreconditionFailed(m)) => Ok(CriterionReport::not_applicable(criterion, m, inst.factorization_refs())),
        Err(e @ Error::WindowTooLarge { .. }) => {
            Ok(CriterionReport::not_applicable(criterion, e.to_string(), inst.factorization_refs()))
        }
        other => other,
    }
}

/// Runs DIRECT, CASEALL, SIEVE (greedy parameters), the n = 7 lemma when it
/// applies, and then the single- and two-window thresholds over
/// [`T_GRID`] × [`U_GRID`], stopping at the first EXISTS. Returns every report
/// produced; failed preconditions become NOT_APPLICABLE reports.
pub fn check_auto(inst: &ProblemInstance) -> Result<Vec<CriterionReport>> {
    let mut out = Vec::new();
    let mut push = |rep: CriterionReport| {
        let done = rep.verdict == Verdict::Exists;
        out.push(rep);
        done
    };
    if push(check_direct(inst)?)
        || push(check_caseall(inst)?)
        || push(check_sieve(inst, &SieveChoice::Auto)?)
    {
        return Ok(out);
    }
    if inst.n == 7 && inst.k == 3 && inst.r == BigUint::from(3u32) && push(soften(Criterion::N7, inst, check_n7_instance(inst))?)
    {
        return Ok(out);
    }
    for t in T_GRID {
        for u in U_GRID {
            let rep = if u == "0" {
                soften(Criterion::Cota, inst, check_cota(inst, t))?
            } else {
                soften(Criterion::Tu, inst, check_tu(inst, t, u))?
            };
            if push(rep) {
                return Ok(out);
            }
        }
    }
    Ok(out)
}
