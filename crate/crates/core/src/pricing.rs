//! Competition-based pricing: an append-only price ledger, the per-record
//! price index, windowed base-price averaging and final quote composition.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DataType, Quality};

#[derive(Debug, Error)]
pub enum PricingError {
    #[error("price must be positive and finite, got {0}")]
    InvalidPrice(f64),
    #[error("{name} must lie in [0, 1], got {value}")]
    ScoreOutOfRange { name: &'static str, value: f64 },
    #[error("execution fee must be finite and non-negative, got {0}")]
    InvalidFee(f64),
    #[error("window start {start} is after end {end}")]
    InvalidWindow { start: i64, end: i64 },
    #[error("no price records for type {data_type} in [{start}, {end})")]
    NoRecords { data_type: DataType, start: i64, end: i64 },
    #[error("price ledger line {line}: {source}")]
    Decode {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn unit_score(name: &'static str, value: f64) -> Result<(), PricingError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(PricingError::ScoreOutOfRange { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    /// Epoch seconds.
    pub timestamp: i64,
    pub data_type: DataType,
    pub price: f64,
    pub quality_score: f64,
    pub risk_score: f64,
}

impl PriceRecord {
    pub fn validate(&self) -> Result<(), PricingError> {
        if !(self.price.is_finite() && self.price > 0.0) {
            return Err(PricingError::InvalidPrice(self.price));
        }
        unit_score("quality score", self.quality_score)?;
        unit_score("risk score", self.risk_score)
    }
}

/// Price normalized by the value-added scores: `price / (QS + RS + 1)`.
pub fn price_index(record: &PriceRecord) -> f64 {
    record.price / (record.quality_score + record.risk_score + 1.0)
}

/// Half-open time interval `[start, end)` in epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: i64,
    pub end: i64,
}

impl Window {
    pub fn new(start: i64, end: i64) -> Result<Self, PricingError> {
        if start > end {
            return Err(PricingError::InvalidWindow { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, t: i64) -> bool {
        self.start <= t && t < self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceQuote {
    pub data_type: DataType,
    pub base_price: f64,
    pub final_price: f64,
    pub qs: f64,
    pub rs: f64,
    pub beta: f64,
    pub exe_fee: f64,
    pub window: Window,
    /// Number of records averaged into `base_price`.
    pub sample_size: usize,
}

/// `(1 + qs + rs) * base + beta * exe_fee`.
pub fn final_price(base_price: f64, qs: f64, rs: f64, beta: f64, exe_fee: f64) -> f64 {
    (1.0 + qs + rs) * base_price + beta * exe_fee
}

/// Default quality score: the demanded ladder level mapped onto `[0, 1]`.
pub fn quality_score(q: Quality) -> f64 {
    f64::from(q.level()) / 100.0
}

/// Weighted average of `(score, weight)` pairs, each score in `[0, 1]`.
/// Returns 0 when all weights are zero.
pub fn weighted_quality_score(parts: &[(f64, f64)]) -> Result<f64, PricingError> {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(score, weight) in parts {
        unit_score("quality component", score)?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(PricingError::ScoreOutOfRange {
                name: "quality weight",
                value: weight,
            });
        }
        num += score * weight;
        den += weight;
    }
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

/// Append-only price ledger. Positions are arrival order; each type keeps a
/// timestamp-sorted index (ties by arrival).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<PriceRecord>", try_from = "Vec<PriceRecord>")]
pub struct PriceLedger {
    records: Vec<PriceRecord>,
    by_type: BTreeMap<DataType, Vec<usize>>,
}

impl PriceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[PriceRecord] {
        &self.records
    }

    /// Appends a record and returns its ledger position.
    pub fn record_price(&mut self, record: PriceRecord) -> Result<usize, PricingError> {
        record.validate()?;
        let pos = self.records.len();
        self.records.push(record);
        let slice = self.by_type.entry(record.data_type).or_default();
        let records = &self.records;
        let at = slice.partition_point(|&p| records[p].timestamp <= record.timestamp);
        slice.insert(at, pos);
        Ok(pos)
    }

    /// Records of one type in timestamp order.
    pub fn type_slice(&self, data_type: DataType) -> impl Iterator<Item = &PriceRecord> {
        self.by_type
            .get(&data_type)
            .into_iter()
            .flatten()
            .map(|&p| &self.records[p])
    }

    fn window_indices(&self, data_type: DataType, window: Window) -> &[usize] {
        let Some(slice) = self.by_type.get(&data_type) else {
            return &[];
        };
        let lo = slice.partition_point(|&p| self.records[p].timestamp < window.start);
        let hi = slice.partition_point(|&p| self.records[p].timestamp < window.end);
        &slice[lo..hi.max(lo)]
    }

    /// Mean price index over the window, with the number of records used.
    /// `None` when the window holds no records for the type.
    pub fn base_price_with_count(&self, data_type: DataType, window: Window) -> Option<(f64, usize)> {
        let idx = self.window_indices(data_type, window);
        if idx.is_empty() {
            return None;
        }
        let sum: f64 = idx.iter().map(|&p| price_index(&self.records[p])).sum();
        Some((sum / idx.len() as f64, idx.len()))
    }

    pub fn base_price(&self, data_type: DataType, window: Window) -> Option<f64> {
        self.base_price_with_count(data_type, window).map(|(p, _)| p)
    }

    pub fn quote(
        &self,
        data_type: DataType,
        window: Window,
        qs: f64,
        rs: f64,
        beta: f64,
        exe_fee: f64,
    ) -> Result<PriceQuote, PricingError> {
        unit_score("quality score", qs)?;
        unit_score("risk score", rs)?;
        unit_score("beta", beta)?;
        if !(exe_fee.is_finite() && exe_fee >= 0.0) {
            return Err(PricingError::InvalidFee(exe_fee));
        }
        let (base_price, sample_size) =
            self.base_price_with_count(data_type, window)
                .ok_or(PricingError::NoRecords {
                    data_type,
                    start: window.start,
                    end: window.end,
                })?;
        Ok(PriceQuote {
            data_type,
            base_price,
            final_price: final_price(base_price, qs, rs, beta, exe_fee),
            qs,
            rs,
            beta,
            exe_fee,
            window,
            sample_size,
        })
    }

    /// One JSON record per line.
    pub fn write_ndjson<W: Write>(&self, mut w: W) -> Result<(), PricingError> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r).map_err(std::io::Error::other)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_ndjson<R: BufRead>(r: R) -> Result<Self, PricingError> {
        let mut ledger = Self::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: PriceRecord =
                serde_json::from_str(&line).map_err(|e| PricingError::Decode {
                    line: n + 1,
                    source: e,
                })?;
            ledger.record_price(record)?;
        }
        Ok(ledger)
    }
}

impl From<PriceLedger> for Vec<PriceRecord> {
    fn from(l: PriceLedger) -> Self {
        l.records
    }
}

impl TryFrom<Vec<PriceRecord>> for PriceLedger {
    type Error = PricingError;

    fn try_from(records: Vec<PriceRecord>) -> Result<Self, Self::Error> {
        let mut ledger = PriceLedger::new();
        for r in records {
            ledger.record_price(r)?;
        }
        Ok(ledger)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(timestamp: i64, t: u16, price: f64, qs: f64, rs: f64) -> PriceRecord {
        PriceRecord {
            timestamp,
            data_type: DataType(t),
            price,
            quality_score: qs,
            risk_score: rs,
        }
    }

    #[test]
    fn record_positions_and_validation() {
        let mut l = PriceLedger::new();
        assert_eq!(l.record_price(rec(5, 0, 1.0, 0.0, 0.0)).unwrap(), 0);
        assert_eq!(l.record_price(rec(5, 0, 2.0, 0.0, 0.0)).unwrap(), 1);
        let prices: Vec<f64> = l.type_slice(DataType(0)).map(|r| r.price).collect();
        assert_eq!(prices, vec![1.0, 2.0]);
        assert!(matches!(
            l.record_price(rec(6, 0, 0.0, 0.0, 0.0)),
            Err(PricingError::InvalidPrice(_))
        ));
        assert!(matches!(
            l.record_price(rec(6, 0, 1.0, 1.5, 0.0)),
            Err(PricingError::ScoreOutOfRange { .. })
        ));
        assert!(l.record_price(rec(6, 0, 1.0, 0.0, -0.1)).is_err());
        assert_eq!(l.len(), 2);
    }

    #[test]
    fn price_index_examples() {
        assert_eq!(price_index(&rec(0, 0, 12.0, 0.0, 0.0)), 12.0);
        assert_eq!(price_index(&rec(0, 0, 12.0, 0.5, 0.5)), 6.0);
    }

    #[test]
    fn base_price_examples() {
        let mut l = PriceLedger::new();
        l.record_price(rec(10, 1, 10.0, 0.0, 0.0)).unwrap();
        let w = Window::new(0, 100).unwrap();
        assert_eq!(l.base_price(DataType(1), w), Some(10.0));
        l.record_price(rec(20, 1, 12.0, 0.5, 0.5)).unwrap();
        l.record_price(rec(30, 1, 6.0, 0.0, 0.0)).unwrap();
        assert_eq!(l.base_price(DataType(1), Window::new(20, 31).unwrap()), Some(6.0));
        // Half-open: the record at 30 is excluded from [20, 30).
        assert_eq!(
            l.base_price_with_count(DataType(1), Window::new(20, 30).unwrap()),
            Some((6.0, 1))
        );
        assert_eq!(l.base_price(DataType(2), w), None);
        assert_eq!(l.base_price(DataType(1), Window::new(40, 50).unwrap()), None);
    }

    #[test]
    fn quote_examples() {
        let mut l = PriceLedger::new();
        l.record_price(rec(0, 0, 10.0, 0.0, 0.0)).unwrap();
        let w = Window::new(0, 1).unwrap();
        assert_eq!(l.quote(DataType(0), w, 0.0, 0.0, 0.0, 0.0).unwrap().final_price, 10.0);
        let q = l.quote(DataType(0), w, 0.3, 0.2, 0.5, 2.0).unwrap();
        assert!((q.final_price - 16.0).abs() < 1e-12);
        assert_eq!(q.sample_size, 1);
        assert!(matches!(
            l.quote(DataType(0), Window::new(5, 9).unwrap(), 0.0, 0.0, 0.0, 0.0),
            Err(PricingError::NoRecords { .. })
        ));
        assert!(Window::new(3, 2).is_err());
    }

    #[test]
    fn quality_scores() {
        assert_eq!(quality_score(Quality::new(70).unwrap()), 0.7);
        assert_eq!(weighted_quality_score(&[(0.5, 1.0), (1.0, 3.0)]).unwrap(), 0.875);
        assert_eq!(weighted_quality_score(&[]).unwrap(), 0.0);
        assert!(weighted_quality_score(&[(2.0, 1.0)]).is_err());
    }

    #[test]
    fn ndjson_round_trip() {
        let mut l = PriceLedger::new();
        l.record_price(rec(9, 0, 3.5, 0.1, 0.2)).unwrap();
        l.record_price(rec(4, 0, 7.25, 0.0, 1.0)).unwrap();
        let mut buf = Vec::new();
        l.write_ndjson(&mut buf).unwrap();
        let back = PriceLedger::read_ndjson(buf.as_slice()).unwrap();
        assert_eq!(back.records(), l.records());
        let ts: Vec<i64> = back.type_slice(DataType(0)).map(|r| r.timestamp).collect();
        assert_eq!(ts, vec![4, 9]);
    }

    proptest! {
        #[test]
        fn per_type_slices_are_sorted(
            entries in proptest::collection::vec((0i64..1000, 0u16..4, 0.1f64..50.0), 100)
        ) {
            let mut l = PriceLedger::new();
            for (t, ty, p) in &entries {
                l.record_price(rec(*t, *ty, *p, 0.0, 0.0)).unwrap();
            }
            prop_assert_eq!(l.len(), 100);
            for ty in 0..4 {
                let ts: Vec<i64> = l.type_slice(DataType(ty)).map(|r| r.timestamp).collect();
                prop_assert!(ts.windows(2).all(|w| w[0] <= w[1]));
            }
        }

        #[test]
        fn index_never_exceeds_price(p in 0.01f64..1e6, qs in 0.0f64..=1.0, rs in 0.0f64..=1.0) {
            prop_assert!(price_index(&rec(0, 0, p, qs, rs)) <= p);
        }

        #[test]
        fn single_record_round_trip(p in 0.01f64..1e4, qs in 0.0f64..=1.0, rs in 0.0f64..=1.0,
                                    beta in 0.0f64..=1.0, fee in 0.0f64..100.0) {
            let mut l = PriceLedger::new();
            l.record_price(rec(0, 0, p, qs, rs)).unwrap();
            let w = Window::new(0, 1).unwrap();
            let q0 = l.quote(DataType(0), w, qs, rs, 0.0, 0.0).unwrap();
            prop_assert!((q0.final_price - p).abs() <= 1e-12 * p);
            let q = l.quote(DataType(0), w, qs, rs, beta, fee).unwrap();
            prop_assert!((q.final_price - (p + beta * fee)).abs() <= 1e-12 * (p + beta * fee));
        }

        #[test]
        fn quote_is_monotone(base in 0.01f64..1e4, qs in 0.0f64..0.5, rs in 0.0f64..0.5,
                             beta in 0.0f64..0.5, fee in 0.0f64..100.0, bump in 0.0f64..0.5) {
            let f = final_price(base, qs, rs, beta, fee);
            prop_assert!(final_price(base, qs + bump, rs, beta, fee) >= f);
            prop_assert!(final_price(base, qs, rs + bump, beta, fee) >= f);
            prop_assert!(final_price(base, qs, rs, beta + bump, fee) >= f);
            prop_assert!(final_price(base, qs, rs, beta, fee + bump) >= f);
            prop_assert!(final_price(base * (1.0 + bump), qs, rs, beta, fee) >= f);
            prop_assert!(f >= base);
        }
    }
}
