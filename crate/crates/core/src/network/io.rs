use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Deserialize;

use super::{Network, Profile, TimeStructure};
use crate::error::{Error, Result};

/// Reads and validates a network JSON document.
pub fn load_network(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Network::from_json_str(&text)
}

#[derive(Debug, Deserialize)]
struct ProfileRecord {
    profile_id: String,
    period: String,
    snapshot: usize,
    value: f64,
}

/// Reads profiles from CSV with columns `profile_id, period, snapshot, value`.
///
/// `snapshot` is the zero-based position inside its period. Every profile must
/// cover every snapshot of `time` exactly once.
pub fn read_profiles_csv<R: std::io::Read>(reader: R, time: &TimeStructure) -> Result<Vec<Profile>> {
    let offsets: HashMap<&str, (usize, usize)> = time
        .periods
        .iter()
        .zip(time.period_ranges())
        .map(|(p, r)| (p.id.as_str(), (r.start, r.len())))
        .collect();
    let n_t = time.n_snapshots();

    let mut values: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    let mut order = Vec::new();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    for rec in rdr.deserialize() {
        let rec: ProfileRecord = rec.map_err(|e| Error::Parse {
            what: "profile csv".into(),
            message: e.to_string(),
        })?;
        let &(start, len) = offsets
            .get(rec.period.as_str())
            .ok_or_else(|| Error::validation(&rec.profile_id, format!("unknown period `{}`", rec.period)))?;
        if rec.snapshot >= len {
            return Err(Error::validation(
                &rec.profile_id,
                format!("snapshot {} outside period `{}`", rec.snapshot, rec.period),
            ));
        }
        let slot = values.entry(rec.profile_id.clone()).or_insert_with(|| {
            order.push(rec.profile_id.clone());
            vec![None; n_t]
        });
        if slot[start + rec.snapshot].replace(rec.value).is_some() {
            return Err(Error::validation(&rec.profile_id, "duplicate snapshot row"));
        }
    }

    order
        .into_iter()
        .map(|id| {
            let vals = values.remove(&id).unwrap_or_default();
            let vals = vals
                .into_iter()
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::validation(&id, "profile does not cover every snapshot"))?;
            Ok(Profile { id, values: vals })
        })
        .collect()
}

pub fn load_profiles_csv(path: impl AsRef<Path>, time: &TimeStructure) -> Result<Vec<Profile>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_profiles_csv(file, time)
}
