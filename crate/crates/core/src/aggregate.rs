//! Aggregation of evidence files into per-dimension records, champions,
//! score variants, and the minimum-states-for-productivity table.

use std::collections::BTreeMap;
use std::io::{self, Write};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::evidence::EvidenceRecord;
use crate::machine::{diagnose, Machine};

#[derive(Debug, Clone, PartialEq)]
pub struct Champion {
    pub index: u64,
    pub machine: String,
    pub ones: BigUint,
    pub hops: BigUint,
    /// hops / ones^2, reported not asserted.
    pub square_ratio: Option<f64>,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Default)]
pub struct DimStats {
    pub machines: u64,
    pub halted: u64,
    pub nonterminating: u64,
    pub holdouts: u64,
    /// Max productivity among halted records.
    pub bb: Option<BigUint>,
    /// Max activity among halted records.
    pub ff: Option<BigUint>,
    pub bb_champion: Option<Champion>,
    pub ff_champion: Option<Champion>,
    /// True when one halted machine achieves both maxima.
    pub one_machine_achieves_both: bool,
    pub max_contiguous: Option<BigUint>,
    /// Halted machines whose productivity squared is under a hundredth of
    /// their activity.
    pub wastrels: Vec<u64>,
    /// Productivity histogram over halted records.
    pub histogram: BTreeMap<BigUint, u64>,
}

#[derive(Debug, Clone, Default)]
pub struct ResultsDB {
    pub dims: BTreeMap<(u8, u8), DimStats>,
}

impl ResultsDB {
    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }
}

fn parse_big(s: &str) -> BigUint {
    s.parse().unwrap_or_else(|_| BigUint::zero())
}

pub fn aggregate<'a>(records: impl IntoIterator<Item = &'a EvidenceRecord>) -> ResultsDB {
    let mut db = ResultsDB::default();
    for record in records {
        let Ok(machine) = Machine::parse(&record.machine) else { continue };
        let stats = db.dims.entry((machine.states(), machine.symbols())).or_default();
        stats.machines += 1;
        match record.status.as_str() {
            crate::evidence::STATUS_HALTED => {
                stats.halted += 1;
                let ones = parse_big(&record.ones);
                let hops = parse_big(&record.hops);
                let contiguous = parse_big(&record.contiguous_ones);
                *stats.histogram.entry(ones.clone()).or_insert(0) += 1;
                if &ones * &ones * BigUint::from(100u32) < hops {
                    stats.wastrels.push(record.machine_index);
                }
                if stats.max_contiguous.as_ref().map_or(true, |c| contiguous > *c) {
                    stats.max_contiguous = Some(contiguous);
                }
                let champion = || Champion {
                    index: record.machine_index,
                    machine: record.machine.clone(),
                    ones: ones.clone(),
                    hops: hops.clone(),
                    square_ratio: square_ratio(&hops, &ones),
                    exhaustive: diagnose(&machine).is_exhaustive,
                };
                if stats.bb.as_ref().map_or(true, |bb| ones > *bb) {
                    stats.bb = Some(ones.clone());
                    stats.bb_champion = Some(champion());
                }
                if stats.ff.as_ref().map_or(true, |ff| hops > *ff) {
                    stats.ff = Some(hops.clone());
                    stats.ff_champion = Some(champion());
                }
            }
            crate::evidence::STATUS_NONTERMINATING => stats.nonterminating += 1,
            _ => stats.holdouts += 1,
        }
    }
    // A second pass settles whether any single machine achieves both maxima.
    for stats in db.dims.values_mut() {
        if let (Some(bb), Some(ff), Some(bbc)) = (&stats.bb, &stats.ff, &stats.bb_champion) {
            stats.one_machine_achieves_both = &bbc.hops == ff
                || stats.ff_champion.as_ref().map_or(false, |ffc| &ffc.ones == bb);
        }
    }
    db
}

fn square_ratio(hops: &BigUint, ones: &BigUint) -> Option<f64> {
    if ones.is_zero() {
        return None;
    }
    let denom = (ones * ones).to_f64()?;
    Some(hops.to_f64()? / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpValue {
    Exact(u8),
    /// No machine with at most the covered state count achieves this
    /// productivity.
    AtLeast(u8),
}

impl std::fmt::Display for PpValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PpValue::Exact(n) => write!(f, "{n}"),
            PpValue::AtLeast(n) => write!(f, ">= {n}"),
        }
    }
}

/// Minimum state count achieving each productivity 1..=k_max with m
/// symbols, from the evidence in `db`.
pub fn pp_table(db: &ResultsDB, m: u8, k_max: u64) -> Vec<(u64, PpValue)> {
    let covered_n: Vec<u8> =
        db.dims.keys().filter(|(_, sym)| *sym == m).map(|(n, _)| *n).collect();
    let max_n = covered_n.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    for k in 1..=k_max {
        let target = BigUint::from(k);
        let hit = db
            .dims
            .iter()
            .filter(|((_, sym), _)| *sym == m)
            .filter(|(_, stats)| stats.histogram.contains_key(&target))
            .map(|((n, _), _)| *n)
            .min();
        out.push((
            k,
            match hit {
                Some(n) => PpValue::Exact(n),
                None => PpValue::AtLeast(max_n + 1),
            },
        ));
    }
    out
}

/// Human-readable aggregation report, one dimension per section.
pub fn write_report<W: Write>(
    db: &ResultsDB,
    pp: Option<(u8, &[(u64, PpValue)])>,
    out: &mut W,
) -> io::Result<()> {
    if db.is_empty() {
        writeln!(out, "empty evidence: nothing to aggregate")?;
        return Ok(());
    }
    for ((n, m), stats) in &db.dims {
        writeln!(out, "== dimension {n}x{m} ==")?;
        writeln!(
            out,
            "machines\t{}\thalted\t{}\tnonterminating\t{}\tholdouts\t{}",
            stats.machines, stats.halted, stats.nonterminating, stats.holdouts
        )?;
        if let (Some(bb), Some(c)) = (&stats.bb, &stats.bb_champion) {
            writeln!(
                out,
                "bb\t{bb}\tchampion\t#{}\t{}\thops\t{}\thops/ones^2\t{}\texhaustive\t{}",
                c.index,
                c.machine,
                c.hops,
                c.square_ratio.map_or("n/a".into(), |r| format!("{r:.3}")),
                c.exhaustive
            )?;
        }
        if let (Some(ff), Some(c)) = (&stats.ff, &stats.ff_champion) {
            writeln!(
                out,
                "ff\t{ff}\tchampion\t#{}\t{}\tones\t{}\texhaustive\t{}",
                c.index, c.machine, c.ones, c.exhaustive
            )?;
        }
        if let Some(c) = &stats.max_contiguous {
            writeln!(out, "max contiguous ones\t{c}")?;
        }
        if !stats.wastrels.is_empty() {
            let list: Vec<String> =
                stats.wastrels.iter().take(20).map(|i| format!("#{i}")).collect();
            writeln!(out, "wastrels\t{}\t{}", stats.wastrels.len(), list.join(","))?;
        }
        let entries: Vec<String> = stats
            .histogram
            .iter()
            .rev()
            .take(15)
            .map(|(ones, count)| format!("{ones}:{count}"))
            .collect();
        writeln!(out, "top productivities\t{}", entries.join(" "))?;
    }
    if let Some((m, table)) = pp {
        writeln!(out, "== placid platypus, {m} symbols ==")?;
        let ks: Vec<String> = table.iter().map(|(k, _)| k.to_string()).collect();
        let vs: Vec<String> = table.iter().map(|(_, v)| v.to_string()).collect();
        writeln!(out, "k\t{}", ks.join("\t"))?;
        writeln!(out, "pp(k,{m})\t{}", vs.join("\t"))?;
    }
    Ok(())
}

/// Per-machine table in the benchmark-report column layout.
pub fn write_machine_table<'a, W: Write>(
    records: impl IntoIterator<Item = &'a EvidenceRecord>,
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "No.\tDim.\tOnes\tHops\tSteps\tOtters\tOtterSteps\tOtterPct\tTime")?;
    for r in records {
        let dim = Machine::parse(&r.machine)
            .map(|m| format!("{}x{}", m.states(), m.symbols()))
            .unwrap_or_else(|_| "?".into());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.2}",
            r.machine_index,
            dim,
            r.ones,
            r.hops,
            r.steps,
            r.otters,
            r.otter_hops,
            otter_pct(&r.otter_hops, &r.hops).map_or("n/a".into(), |p| format!("{p:.2}")),
            r.wall_seconds
        )?;
    }
    Ok(())
}

pub fn otter_pct(otter_hops: &str, hops: &str) -> Option<f64> {
    let oh = parse_big(otter_hops);
    let h = parse_big(hops);
    if h.is_zero() {
        return None;
    }
    // Exact to two decimals: floor(oh * 10^4 / h) / 100.
    let scaled = (oh * BigUint::from(10_000u32)) / h;
    Some(scaled.to_f64()? / 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_machine, ClassifyBudgets};

    fn record(line: &str) -> EvidenceRecord {
        let machine = Machine::parse(line).unwrap();
        classify_machine(0, &machine, &ClassifyBudgets::default())
    }

    #[test]
    fn champions_and_ratio() {
        let records =
            vec![record("1RB1LB_1LA1RZ"), record("1RB1RZ_1LA---"), record("1RB1LA_0LA0RB")];
        let db = aggregate(records.iter());
        let stats = &db.dims[&(2, 2)];
        assert_eq!(stats.machines, 3);
        assert_eq!(stats.halted, 2);
        assert_eq!(stats.nonterminating, 1);
        assert_eq!(stats.bb, Some(BigUint::from(4u32)));
        assert_eq!(stats.ff, Some(BigUint::from(6u32)));
        assert!(stats.one_machine_achieves_both);
    }

    #[test]
    fn pp_values_with_gaps() {
        let records = vec![record("1RZ"), record("1RB1LB_1LA1RZ")];
        let db = aggregate(records.iter());
        let table = pp_table(&db, 2, 5);
        assert_eq!(table[0].1, PpValue::Exact(1));
        assert_eq!(table[3].1, PpValue::Exact(2));
        // Nothing halted with exactly 2, 3, or 5 ones in this tiny sample.
        assert_eq!(table[1].1, PpValue::AtLeast(3));
        assert_eq!(table[4].1, PpValue::AtLeast(3));
    }

    #[test]
    fn empty_evidence_is_flagged() {
        let db = aggregate([]);
        assert!(db.is_empty());
        let mut buf = Vec::new();
        write_report(&db, None, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("empty evidence"));
    }

    #[test]
    fn otter_pct_is_exact() {
        assert_eq!(otter_pct("47010381", "47176870"), Some(99.64));
        assert_eq!(otter_pct("0", "10"), Some(0.0));
        assert_eq!(otter_pct("10", "10"), Some(100.0));
        assert_eq!(otter_pct("5", "0"), None);
    }
}
