use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::pcgroup::{parse_presentation, print_presentation, Element, PcGroup, Subgroup};

use super::{Entry, Filter, FilterError, MonoidIndex, Origin, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub index: Vec<u32>,
    pub igs: Vec<Vec<u32>>,
    /// Decimal order of the subgroup.
    pub order: String,
    #[serde(default = "default_origin")]
    pub origin: String,
}

fn default_origin() -> String {
    Origin::InputSeries.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterJson {
    pub sign: i32,
    pub d: usize,
    pub entries: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<String>,
}

impl Filter {
    pub fn to_json(&self, with_presentation: bool) -> FilterJson {
        FilterJson {
            sign: self.sign.as_int(),
            d: self.d,
            entries: self
                .entries
                .iter()
                .map(|e| EntryJson {
                    index: e.index.coords().to_vec(),
                    igs: e.subgroup.igs().iter().map(|x| x.0.clone()).collect(),
                    order: e.subgroup.order().to_string(),
                    origin: e.origin.to_string(),
                })
                .collect(),
            presentation: with_presentation.then(|| print_presentation(self.group.presentation())),
        }
    }

    /// Rebuild a filter. The group comes from the embedded presentation when
    /// present, otherwise from `group`. Stored orders must match the igs.
    pub fn from_json(j: &FilterJson, group: Option<&Arc<PcGroup>>) -> Result<Filter, FilterError> {
        let g = match (&j.presentation, group) {
            (Some(text), _) => parse_presentation(text).map_err(|e| FilterError::Json(e.to_string()))?,
            (None, Some(g)) => g.clone(),
            (None, None) => return Err(FilterError::Json("no presentation given".into())),
        };
        let sign = match j.sign {
            1 => Sign::Max,
            -1 => Sign::Min,
            s => return Err(FilterError::Json(format!("sign must be 1 or -1, got {s}"))),
        };
        if j.d == 0 {
            return Err(FilterError::Json("rank must be at least 1".into()));
        }
        let mut entries = Vec::with_capacity(j.entries.len());
        for e in &j.entries {
            if e.index.len() != j.d {
                return Err(FilterError::RankMismatch(e.index.len(), j.d));
            }
            let igs = e.igs.iter().cloned().map(Element).collect();
            let h = Subgroup::from_igs(&g, igs)?;
            if h.order().to_string() != e.order {
                return Err(FilterError::Json(format!(
                    "entry at {:?} claims order {} but generates order {}",
                    e.index,
                    e.order,
                    h.order()
                )));
            }
            let origin = e.origin.parse().map_err(FilterError::Json)?;
            entries.push(Entry::new(MonoidIndex::new(e.index.clone()), h, origin));
        }
        Filter::new(&g, j.d, sign, entries)
    }
}
