use std::io::{self, BufWriter};

use anyhow::Result;
use drgkit::search::{for_each_candidate, search_cases, CandidateReport, Mode, CASES, CSV_HEADER};

use crate::{ModeArg, Report};

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Strict => Mode::Strict,
        ModeArg::Extended => Mode::Extended,
    }
}

fn cases_of(case: Option<(usize, usize)>) -> Vec<(usize, usize)> {
    case.map_or_else(|| CASES.to_vec(), |c| vec![c])
}

fn header() -> Vec<String> {
    CSV_HEADER.iter().map(|s| s.to_string()).collect()
}

pub fn search(case: Option<(usize, usize)>, mode: ModeArg) -> Result<Report> {
    let report = search_cases(&cases_of(case), mode_of(mode))?;
    let mut csv = vec![header()];
    for c in &report.cases {
        csv.extend(c.spectral_stage.iter().map(|r| r.csv_record().to_vec()));
    }
    Ok(Report {
        json: serde_json::to_value(&report)?,
        text: report.to_string(),
        csv: Some(csv),
        failed: report.survivors > 0,
    })
}

/// Every examined candidate as a CSV row, written as the walk proceeds.
pub fn stream_all(case: Option<(usize, usize)>, mode: ModeArg) -> Result<bool> {
    let mut w = csv::Writer::from_writer(BufWriter::new(io::stdout().lock()));
    w.write_record(CSV_HEADER)?;
    let mut err: Option<csv::Error> = None;
    let mut survivors = 0;
    for (j, d) in cases_of(case) {
        let report = for_each_candidate(j, d, mode_of(mode), |r: CandidateReport| {
            if err.is_none() {
                err = w.write_record(r.csv_record()).err();
            }
        })?;
        if let Some(e) = err.take() {
            return Err(e.into());
        }
        survivors += report.survivors.len();
    }
    w.flush()?;
    Ok(survivors == 0)
}
