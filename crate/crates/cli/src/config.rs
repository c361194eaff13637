//! Flag/config-file resolution and map construction.
//!
//! A config file holds `key=value` lines with the same keys as the long
//! flags; explicit flags win over file entries.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use circlelab::cfarith::{cf_expand, quadratic_irrational, QuadraticKind};
use circlelab::maps::Family;
use circlelab::{Cf, Hp, Map, Real};
use num_traits::Zero;

use crate::fail;
use crate::output::TunedJson;

/// Raw key=value config file.
#[derive(Default, Clone, Debug)]
pub struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Self {
        let Some(path) = path else {
            return Self::default();
        };
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => fail("E_CONFIG", 2, &format!("reading {}: {e}", path.display())),
        };
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    map.insert(k.trim().to_string(), v.trim().to_string());
                }
                None => fail(
                    "E_CONFIG",
                    2,
                    &format!("{}:{}: expected key=value", path.display(), lineno + 1),
                ),
            }
        }
        FileConfig(map)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

/// Flag value, else config-file value, else default.
pub fn resolve<T: Clone + std::str::FromStr>(
    flag: Option<T>,
    file: &FileConfig,
    key: &str,
    default: Option<T>,
) -> Option<T> {
    if let Some(v) = flag {
        return Some(v);
    }
    if let Some(raw) = file.get(key) {
        match raw.parse::<T>() {
            Ok(v) => return Some(v),
            Err(_) => fail("E_CONFIG", 2, &format!("config key {key}={raw} unparsable")),
        }
    }
    default
}

pub fn parse_real(name: &str, s: &str) -> Hp {
    match Hp::from_decimal(s) {
        Some(v) => v,
        None => fail("E_CONFIG", 2, &format!("--{name} {s:?} is not a decimal")),
    }
}

/// A rotation-number target: the named quadratic irrationals or a
/// periodic quotient word `word:k1,k2,...`.
pub fn parse_target(s: &str) -> QuadraticKind {
    match s {
        "golden" => QuadraticKind::Golden,
        "silver" => QuadraticKind::Silver,
        other => {
            if let Some(list) = other.strip_prefix("word:") {
                let word: Result<Vec<u64>, _> =
                    list.split(',').map(|t| t.trim().parse::<u64>()).collect();
                match word {
                    Ok(w) if !w.is_empty() => QuadraticKind::Periodic(w),
                    _ => fail("E_CONFIG", 2, &format!("target word {other:?} unparsable")),
                }
            } else {
                fail(
                    "E_CONFIG",
                    2,
                    &format!("unknown target {other:?} (golden, silver, word:...)"),
                )
            }
        }
    }
}

pub fn target_value(kind: &QuadraticKind) -> Hp {
    match quadratic_irrational(kind) {
        Ok(v) => v,
        Err(e) => fail("E_PRECONDITION", 2, &e.to_string()),
    }
}

pub fn target_name(kind: &QuadraticKind) -> String {
    match kind {
        QuadraticKind::Golden => "golden".into(),
        QuadraticKind::Silver => "silver".into(),
        QuadraticKind::Periodic(w) => format!(
            "word:{}",
            w.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        ),
    }
}

/// The family named by `--family` with its coefficient flags.
pub fn build_family(
    family: &str,
    a: Option<&Hp>,
    a1: Option<&Hp>,
    a2: Option<&Hp>,
) -> circlelab::Result<Family<Hp>> {
    match family {
        "rotation" => Ok(Family::rotations()),
        "arnold" => {
            let a = a.cloned().unwrap_or_else(Zero::zero);
            Family::arnold(a)
        }
        "two_harmonic" => {
            let a1 = a1.cloned().unwrap_or_else(Zero::zero);
            let a2 = a2.cloned().unwrap_or_else(Zero::zero);
            Family::two_harmonic(a1, a2)
        }
        other => Err(circlelab::Error::precondition(format!(
            "unknown family {other:?} (rotation, arnold, two_harmonic)"
        ))),
    }
}

/// A fully resolved experiment subject: the map, the exact rotation
/// target it was tuned to, and its continued fraction.
pub struct Subject {
    pub map: Map,
    pub target: QuadraticKind,
    pub rho: Hp,
    pub descriptor: String,
}

impl Subject {
    pub fn cf(&self, levels: usize) -> Cf {
        match cf_expand(&self.rho, levels) {
            Ok(cf) => cf,
            Err(e) => fail("E_RESOURCE", 3, &e.to_string()),
        }
    }
}

/// Resolves the subject of a denjoy/conjugacy run: either a tuned-map
/// JSON from `lab tune`, or a rotation given by `--target`.
#[allow(clippy::too_many_arguments)]
pub fn resolve_subject(
    tuned: Option<&Path>,
    family: Option<&str>,
    target: Option<&str>,
    t: Option<&Hp>,
    a: Option<&Hp>,
    a1: Option<&Hp>,
    a2: Option<&Hp>,
) -> Subject {
    if let Some(path) = tuned {
        let tj: TunedJson = crate::output::must(crate::output::read_json(path));
        let kind = parse_target(&tj.target);
        let fam = {
            let get = |k: &str| -> Option<Hp> {
                tj.parameters
                    .get(k)
                    .and_then(|v| v.as_str())
                    .map(|s| parse_real(k, s))
            };
            match build_family(&tj.family, get("a").as_ref(), get("a1").as_ref(), get("a2").as_ref())
            {
                Ok(f) => f,
                Err(e) => fail("E_PRECONDITION", 2, &e.to_string()),
            }
        };
        let t_star = parse_real("t_star", &tj.t_star);
        let map = match fam.at(t_star) {
            Ok(m) => m,
            Err(e) => fail("E_PRECONDITION", 2, &e.to_string()),
        };
        let rho = target_value(&kind);
        let descriptor = map.descriptor();
        return Subject {
            map,
            target: kind,
            rho,
            descriptor,
        };
    }

    let Some(target) = target else {
        fail(
            "E_CONFIG",
            2,
            "need either --tuned <tuned.json> or --family/--target",
        )
    };
    let kind = parse_target(target);
    let rho = target_value(&kind);
    match family.unwrap_or("rotation") {
        "rotation" => {
            let map = match Map::rotation(rho.clone()) {
                Ok(m) => m,
                Err(e) => fail("E_PRECONDITION", 2, &e.to_string()),
            };
            let descriptor = map.descriptor();
            Subject {
                map,
                target: kind,
                rho,
                descriptor,
            }
        }
        fam_name => {
            // explicit parameter: the caller promises t was tuned to the
            // target (typically copied from tuned.json)
            let Some(t) = t else {
                fail(
                    "E_CONFIG",
                    2,
                    &format!("family {fam_name} needs --t (or use --tuned)"),
                )
            };
            let fam = match build_family(fam_name, a, a1, a2) {
                Ok(f) => f,
                Err(e) => fail("E_PRECONDITION", 2, &e.to_string()),
            };
            let map = match fam.at(t.clone()) {
                Ok(m) => m,
                Err(e) => fail("E_PRECONDITION", 2, &e.to_string()),
            };
            let descriptor = map.descriptor();
            Subject {
                map,
                target: kind,
                rho,
                descriptor,
            }
        }
    }
}

