//! Seeded synthetic instances and the portfolio data CSV format.
//!
//! CSV layout: first line `T,n,seed`, then `T` rows of `n` values written with
//! 17 significant digits.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::DataMatrix;
use crate::rng::normal;

/// Lower clamp for synthetic price ratios.
pub const MIN_PRICE_RATIO: f64 = 0.01;

/// Standard deviation of the synthetic price-ratio noise.
pub const PRICE_RATIO_SD: f64 = 0.1;

/// `T x n` price ratios `max(1 + 0.1 z, 0.01)` with `z` standard normal,
/// row-major draw order.
pub fn gen_portfolio_data(periods: usize, assets: usize, seed: u64) -> Vec<f64> {
    (0..periods * assets)
        .map(|j| (1.0 + PRICE_RATIO_SD * normal(seed, j as u64)).max(MIN_PRICE_RATIO))
        .collect()
}

pub fn portfolio_matrix(periods: usize, assets: usize, seed: u64) -> DataMatrix {
    DataMatrix::dense(periods, assets, gen_portfolio_data(periods, assets, seed))
        .expect("generator produces T*n entries")
}

/// Gaussian features and labels from a seeded random hyperplane with 10%
/// label noise.
pub fn gen_logistic_data(samples: usize, features: usize, seed: u64) -> (DataMatrix, Vec<f64>) {
    let data: Vec<f64> = (0..samples * features)
        .map(|j| normal(seed, j as u64))
        .collect();
    let offset = (samples * features) as u64;
    let w: Vec<f64> = (0..features)
        .map(|j| normal(seed, offset + j as u64))
        .collect();
    let labels = (0..samples)
        .map(|i| {
            let z: f64 = data[i * features..(i + 1) * features]
                .iter()
                .zip(&w)
                .map(|(a, b)| a * b)
                .sum();
            let flip = crate::rng::uniform(seed ^ 0x5DEECE66D, i as u64) < 0.1;
            let y = if z >= 0.0 { 1.0 } else { -1.0 };
            if flip {
                -y
            } else {
                y
            }
        })
        .collect();
    (
        DataMatrix::dense(samples, features, data).expect("sized"),
        labels,
    )
}

/// Formats with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_portfolio_csv<W: Write>(
    mut out: W,
    periods: usize,
    assets: usize,
    seed: u64,
    data: &[f64],
) -> Result<()> {
    let io = |e| Error::io("<portfolio csv>", e);
    writeln!(out, "{periods},{assets},{seed}").map_err(io)?;
    for row in data.chunks(assets.max(1)) {
        let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        writeln!(out, "{}", line.join(",")).map_err(io)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioData {
    pub periods: usize,
    pub assets: usize,
    pub seed: u64,
    pub data: Vec<f64>,
}

pub fn read_portfolio_csv<R: BufRead>(reader: R) -> Result<PortfolioData> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing `T,n,seed` header".into(),
        })??;
    let field = |i: usize, what: &str| -> Result<u64> {
        header
            .get(i)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("bad {what} in header"),
            })
    };
    let periods = field(0, "T")? as usize;
    let assets = field(1, "n")? as usize;
    let seed = field(2, "seed")?;
    let mut data = Vec::with_capacity(periods * assets);
    for (row, rec) in records.enumerate() {
        let rec = rec?;
        let line = row + 2;
        if rec.len() != assets {
            return Err(Error::Parse {
                line,
                msg: format!("expected {assets} values, found {}", rec.len()),
            });
        }
        for v in rec.iter() {
            data.push(v.trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("bad value `{v}`"),
            })?);
        }
    }
    if data.len() != periods * assets {
        return Err(Error::Parse {
            line: periods + 1,
            msg: format!("expected {periods} data rows"),
        });
    }
    Ok(PortfolioData {
        periods,
        assets,
        seed,
        data,
    })
}

pub fn load_portfolio_csv(path: impl AsRef<Path>) -> Result<PortfolioData> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_portfolio_csv(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(gen_portfolio_data(30, 20, 42), gen_portfolio_data(30, 20, 42));
        assert_ne!(gen_portfolio_data(30, 20, 42), gen_portfolio_data(30, 20, 43));
    }

    #[test]
    fn large_draw_statistics() {
        let d = gen_portfolio_data(1000, 800, 1);
        assert!(d.iter().all(|&v| v >= MIN_PRICE_RATIO));
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        assert!((mean - 1.0).abs() < 1e-3, "mean {mean}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let d = gen_portfolio_data(4, 3, 9);
        let mut buf = Vec::new();
        write_portfolio_csv(&mut buf, 4, 3, 9, &d).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("4,3,9\n"));
        let back = read_portfolio_csv(&buf[..]).unwrap();
        assert_eq!(back.data, d);
        assert_eq!((back.periods, back.assets, back.seed), (4, 3, 9));
    }

    #[test]
    fn csv_shape_errors() {
        assert!(read_portfolio_csv("2,2,0\n1,1\n".as_bytes()).is_err());
        assert!(read_portfolio_csv("1,2,0\n1,1,1\n".as_bytes()).is_err());
        assert!(read_portfolio_csv("x,2,0\n".as_bytes()).is_err());
    }

    #[test]
    fn logistic_labels_are_signs() {
        let (m, y) = gen_logistic_data(50, 5, 3);
        assert_eq!(m.n_rows(), 50);
        assert!(y.iter().all(|&v| v == 1.0 || v == -1.0));
    }
}
