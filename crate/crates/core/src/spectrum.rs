//! Energy spectra of knot families built from ropelength data.
//!
//! Records are grouped by crossing number. A family's level is the energy
//! of its mean ropelength, not the mean of its members' energies.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::energy::energy_from_ropelength;
use crate::error::{domain, Error, Result};

/// Comment written at the top of every CSV table.
pub const CSV_CAUTION: &str =
    "# ropelengths are numerical estimates from finite tightening runs; treat energy levels as approximate";

/// `%g`-style formatting with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    fmt_sig_digits(x, 12)
}

/// `%g`-style formatting with `digits` significant digits.
pub fn fmt_sig_digits(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Where a ropelength came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Tightened,
    Imported,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Tightened => "tightened",
            Source::Imported => "imported",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnotRecord {
    pub name: String,
    pub cmin: u32,
    pub ropelength: f64,
    pub writhe: Option<f64>,
    pub source: Source,
}

impl KnotRecord {
    pub fn new(name: impl Into<String>, cmin: u32, ropelength: f64) -> Self {
        Self {
            name: name.into(),
            cmin,
            ropelength,
            writhe: None,
            source: Source::Imported,
        }
    }

    pub fn with_writhe(self, writhe: f64) -> Self {
        Self {
            writhe: Some(writhe),
            ..self
        }
    }

    pub fn with_source(self, source: Source) -> Self {
        Self { source, ..self }
    }

    /// `M*(h)` at unit volume and flux.
    pub fn energy(&self, framing: f64) -> Result<f64> {
        energy_from_ropelength(self.ropelength, framing)
            .map_err(|e| domain(format!("record {}: {e}", self.name)))
    }
}

/// Per-crossing-number aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySummary {
    pub cmin: u32,
    pub count: usize,
    pub mean_ropelength: f64,
    /// Energy of the mean ropelength at `h = 0`.
    pub mean_energy: f64,
    pub min_energy: f64,
    pub max_energy: f64,
}

impl FamilySummary {
    pub fn energy(&self, framing: f64) -> Result<f64> {
        energy_from_ropelength(self.mean_ropelength, framing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    /// Knot name, or `family_<cmin>` for family levels.
    pub label: String,
    pub cmin: u32,
    pub framing: f64,
    pub m_star: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
    pub families: Vec<FamilySummary>,
}

/// Pair whose energy order contradicts its crossing-number order.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub lower: String,
    pub lower_cmin: u32,
    pub lower_energy: f64,
    pub higher: String,
    pub higher_cmin: u32,
    pub higher_energy: f64,
}

/// Extreme members of one family.
#[derive(Debug, Clone, PartialEq)]
pub struct Outlier {
    pub cmin: u32,
    pub min_name: String,
    pub min_energy: f64,
    pub max_name: String,
    pub max_energy: f64,
}

fn sorted(records: &[KnotRecord]) -> Vec<&KnotRecord> {
    let mut out: Vec<&KnotRecord> = records.iter().collect();
    out.sort_by(|a, b| (a.cmin, &a.name).cmp(&(b.cmin, &b.name)));
    out
}

fn grouped(records: &[KnotRecord]) -> BTreeMap<u32, Vec<&KnotRecord>> {
    let mut families: BTreeMap<u32, Vec<&KnotRecord>> = BTreeMap::new();
    for r in sorted(records) {
        families.entry(r.cmin).or_default().push(r);
    }
    families
}

/// Mean ropelength and its energy per crossing number, ascending in `cmin`.
pub fn family_average(records: &[KnotRecord]) -> Result<Vec<FamilySummary>> {
    let mut out = Vec::new();
    for (cmin, members) in grouped(records) {
        let mut energies = Vec::with_capacity(members.len());
        for r in &members {
            energies.push(r.energy(0.0)?);
        }
        let mean_ropelength =
            members.iter().map(|r| r.ropelength).sum::<f64>() / members.len() as f64;
        out.push(FamilySummary {
            cmin,
            count: members.len(),
            mean_ropelength,
            mean_energy: energy_from_ropelength(mean_ropelength, 0.0)?,
            min_energy: energies.iter().copied().fold(f64::INFINITY, f64::min),
            max_energy: energies.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    Ok(out)
}

/// `M*(h)` for every record and family level over `h_grid`.
pub fn spectrum_rows(records: &[KnotRecord], h_grid: &[f64]) -> Result<SpectrumTable> {
    if let Some(h) = h_grid.iter().find(|h| !h.is_finite()) {
        return Err(domain(format!("framing grid contains {h}")));
    }
    let families = family_average(records)?;
    let mut rows = Vec::new();
    for r in sorted(records) {
        for &h in h_grid {
            rows.push(SpectrumRow {
                label: r.name.clone(),
                cmin: r.cmin,
                framing: h,
                m_star: r.energy(h)?,
            });
        }
    }
    for f in &families {
        for &h in h_grid {
            rows.push(SpectrumRow {
                label: format!("family_{}", f.cmin),
                cmin: f.cmin,
                framing: h,
                m_star: f.energy(h)?,
            });
        }
    }
    Ok(SpectrumTable { rows, families })
}

/// Positive framing at which the energy parabolas of ropelengths `rl1` and
/// `rl2` cross; `None` when the ropelengths are equal.
pub fn crossing_framing(rl1: f64, rl2: f64) -> Result<Option<f64>> {
    if !(rl1 > 0.0 && rl2 > 0.0) {
        return Err(domain(format!(
            "ropelengths must be positive, got {rl1} and {rl2}"
        )));
    }
    if rl1 == rl2 {
        return Ok(None);
    }
    // M*(h) = a(rl) + b(rl) h^2.
    let a = |rl: f64| energy_from_ropelength(rl, 0.0);
    let b = |rl: f64| -> f64 { std::f64::consts::PI.powf(4.0 / 3.0) / rl.powf(2.0 / 3.0) };
    let h2 = (a(rl2)? - a(rl1)?) / (b(rl1) - b(rl2));
    Ok(Some(h2.sqrt()))
}

/// Crossing framings between consecutive families.
pub fn family_crossings(families: &[FamilySummary]) -> Result<Vec<(u32, u32, Option<f64>)>> {
    families
        .windows(2)
        .map(|w| {
            Ok((
                w[0].cmin,
                w[1].cmin,
                crossing_framing(w[0].mean_ropelength, w[1].mean_ropelength)?,
            ))
        })
        .collect()
}

/// Pairs with lower crossing number but higher ground-state energy.
pub fn ordering_report(records: &[KnotRecord]) -> Result<Vec<Inversion>> {
    let ordered = sorted(records);
    let mut energies = Vec::with_capacity(ordered.len());
    for r in &ordered {
        energies.push(r.energy(0.0)?);
    }
    let mut out = Vec::new();
    for (i, a) in ordered.iter().enumerate() {
        for (j, b) in ordered.iter().enumerate() {
            if a.cmin < b.cmin && energies[i] > energies[j] {
                out.push(Inversion {
                    lower: a.name.clone(),
                    lower_cmin: a.cmin,
                    lower_energy: energies[i],
                    higher: b.name.clone(),
                    higher_cmin: b.cmin,
                    higher_energy: energies[j],
                });
            }
        }
    }
    Ok(out)
}

/// Lowest and highest ground-state energy per family; ties go to the
/// lexicographically smaller name.
pub fn outlier_table(records: &[KnotRecord]) -> Result<Vec<Outlier>> {
    let mut out = Vec::new();
    for (cmin, members) in grouped(records) {
        let mut lo: Option<(&KnotRecord, f64)> = None;
        let mut hi: Option<(&KnotRecord, f64)> = None;
        // Members are sorted by name, so strict comparisons keep the first on ties.
        for r in members {
            let e = r.energy(0.0)?;
            if lo.map_or(true, |(_, m)| e < m) {
                lo = Some((r, e));
            }
            if hi.map_or(true, |(_, m)| e > m) {
                hi = Some((r, e));
            }
        }
        let ((lo, lo_e), (hi, hi_e)) =
            (lo.expect("non-empty family"), hi.expect("non-empty family"));
        out.push(Outlier {
            cmin,
            min_name: lo.name.clone(),
            min_energy: lo_e,
            max_name: hi.name.clone(),
            max_energy: hi_e,
        });
    }
    Ok(out)
}

/// Reads `name,cmin,ropelength[,writhe]` rows; `#` lines are comments and a
/// header row is optional.
pub fn read_records(reader: impl Read, source: Source) -> Result<Vec<KnotRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.get(0) == Some("name") {
            continue;
        }
        if row.len() < 3 || row.len() > 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 or 4 fields, found {}", row.len()),
            });
        }
        let bad = |what: &str, field: &str| Error::Parse {
            line,
            message: format!("bad {what} '{field}'"),
        };
        let cmin = row[1].parse::<u32>().map_err(|_| bad("cmin", &row[1]))?;
        let ropelength = row[2]
            .parse::<f64>()
            .map_err(|_| bad("ropelength", &row[2]))?;
        if !(ropelength.is_finite() && ropelength > 0.0) {
            return Err(Error::Parse {
                line,
                message: format!("ropelength must be positive, got {ropelength}"),
            });
        }
        let mut record = KnotRecord::new(&row[0], cmin, ropelength).with_source(source);
        if let Some(w) = row.get(3).filter(|w| !w.is_empty()) {
            record = record.with_writhe(w.parse::<f64>().map_err(|_| bad("writhe", w))?);
        }
        out.push(record);
    }
    Ok(out)
}

pub fn load_records(path: impl AsRef<Path>, source: Source) -> Result<Vec<KnotRecord>> {
    read_records(std::fs::File::open(path)?, source)
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header)?;
    for row in rows {
        wtr.write_record(&row)?;
    }
    let body = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(format!(
        "{CSV_CAUTION}\n{}",
        String::from_utf8(body).expect("utf-8 csv")
    ))
}

pub fn records_csv(records: &[KnotRecord]) -> Result<String> {
    table(
        &["name", "cmin", "ropelength", "writhe", "source"],
        sorted(records).into_iter().map(|r| {
            vec![
                r.name.clone(),
                r.cmin.to_string(),
                fmt_sig(r.ropelength),
                r.writhe.map(fmt_sig).unwrap_or_default(),
                r.source.as_str().to_string(),
            ]
        }),
    )
}

pub fn spectrum_csv(table_: &SpectrumTable) -> Result<String> {
    table(
        &["label", "cmin", "h", "m_star"],
        table_.rows.iter().map(|r| {
            vec![
                r.label.clone(),
                r.cmin.to_string(),
                fmt_sig(r.framing),
                fmt_sig(r.m_star),
            ]
        }),
    )
}

pub fn families_csv(families: &[FamilySummary]) -> Result<String> {
    table(
        &[
            "cmin",
            "count",
            "mean_ropelength",
            "mean_m0",
            "min_m0",
            "max_m0",
        ],
        families.iter().map(|f| {
            vec![
                f.cmin.to_string(),
                f.count.to_string(),
                fmt_sig(f.mean_ropelength),
                fmt_sig(f.mean_energy),
                fmt_sig(f.min_energy),
                fmt_sig(f.max_energy),
            ]
        }),
    )
}

pub fn inversions_csv(inversions: &[Inversion]) -> Result<String> {
    table(
        &[
            "lower",
            "lower_cmin",
            "lower_m0",
            "higher",
            "higher_cmin",
            "higher_m0",
        ],
        inversions.iter().map(|i| {
            vec![
                i.lower.clone(),
                i.lower_cmin.to_string(),
                fmt_sig(i.lower_energy),
                i.higher.clone(),
                i.higher_cmin.to_string(),
                fmt_sig(i.higher_energy),
            ]
        }),
    )
}

pub fn outliers_csv(outliers: &[Outlier]) -> Result<String> {
    table(
        &["cmin", "min_knot", "min_m0", "max_knot", "max_m0"],
        outliers.iter().map(|o| {
            vec![
                o.cmin.to_string(),
                o.min_name.clone(),
                fmt_sig(o.min_energy),
                o.max_name.clone(),
                fmt_sig(o.max_energy),
            ]
        }),
    )
}

pub fn crossings_csv(crossings: &[(u32, u32, Option<f64>)]) -> Result<String> {
    table(
        &["cmin_a", "cmin_b", "h_cr"],
        crossings.iter().map(|(a, b, h)| {
            vec![
                a.to_string(),
                b.to_string(),
                h.map(fmt_sig).unwrap_or_default(),
            ]
        }),
    )
}
