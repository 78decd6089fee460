//! Command-line front end: randomized verification sweeps, timing runs and demonstrations.

pub mod bench;
pub mod demo;
pub mod error;
pub mod spec_io;
pub mod verify;

use recwidth::fixtures::RKind;

use crate::error::CliError;

/// Parses `a..b` (exclusive) or a comma list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("invalid seed list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a >= b {
            return Err(CliError::Usage(format!("empty seed range {s:?}")));
        }
        return Ok((a..b).collect());
    }
    parse_list(s, "seed")
}

/// Comma-separated numbers; an empty list is rejected.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    let v = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| CliError::Usage(format!("invalid {what} {x:?}"))))
        .collect::<Result<Vec<T>, _>>()?;
    if v.is_empty() {
        return Err(CliError::Usage(format!("{what} list is empty")));
    }
    Ok(v)
}

pub fn parse_kinds(s: &str) -> Result<Vec<RKind>, CliError> {
    if s.trim() == "all" {
        return Ok(RKind::ALL.to_vec());
    }
    s.split(',')
        .map(|x| {
            RKind::ALL.into_iter().find(|k| k.name() == x.trim()).ok_or_else(|| {
                let names: Vec<&str> = RKind::ALL.iter().map(|k| k.name()).collect();
                CliError::Usage(format!("unknown operator kind {x:?}; expected one of {}", names.join(", ")))
            })
        })
        .collect()
}
