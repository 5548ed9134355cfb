//! Reference curves shipped with the crate.
//!
//! Each curve file carries the published analytic values in the `analytic`
//! column and, where published, the simulated points in the `sim` column
//! (without intervals). Names match the curves emitted by
//! [`reproduce`](super::run::reproduce).

use super::config::Figure;
use super::table::{read_curve, read_rate_table, CurveRow, RateRow};
use crate::error::Result;

macro_rules! curves {
    ($($name:literal),+ $(,)?) => {
        &[$(($name, include_str!(concat!("../../data/", $name, ".csv")))),+]
    };
}

const CURVES: &[(&str, &str)] = curves!(
    "fig2_hd",
    "fig2_fd_eps0.2",
    "fig2_fd_eps0.8",
    "fig3_eps0.8_pd40",
    "fig3_eps0.2_pd40",
    "fig3_eps0.8_pd23",
    "fig3_eps0.2_pd23",
    "fig4_dl_r400_eps0.2",
    "fig4_dl_r400_eps0.8",
    "fig4_dl_r200_eps0.2",
    "fig4_dl_r200_eps0.8",
    "fig4_ul_r400_eps0.2",
    "fig4_ul_r400_eps0.8",
    "fig4_ul_r200_eps0.2",
    "fig4_ul_r200_eps0.8",
    "fig5_ul_fd_pd23_eps0.8",
    "fig5_dl_fd_pd40_eps0.8",
    "fig5_dl_fd_pd23_eps0.8",
    "fig5_dl_hd",
);

const TABLE1: &str = include_str!("../../data/table1.csv");

/// Names of every shipped curve.
pub fn curve_names() -> impl Iterator<Item = &'static str> {
    CURVES.iter().map(|c| c.0)
}

/// Raw CSV text of a shipped curve.
pub fn curve_text(name: &str) -> Option<&'static str> {
    CURVES.iter().find(|c| c.0 == name).map(|c| c.1)
}

pub fn curve(name: &str) -> Option<Result<Vec<CurveRow>>> {
    curve_text(name).map(|text| read_curve(text.as_bytes(), name))
}

/// Curves of one figure, in publication order.
pub fn figure_curves(figure: Figure) -> Result<Vec<(&'static str, Vec<CurveRow>)>> {
    let prefix = format!("{}_", figure.as_str());
    CURVES
        .iter()
        .filter(|c| c.0.starts_with(&prefix))
        .map(|&(name, text)| Ok((name, read_curve(text.as_bytes(), name)?)))
        .collect()
}

pub fn table1() -> Result<Vec<RateRow>> {
    read_rate_table(TABLE1.as_bytes(), "table1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_shipped_file_parses() {
        for name in curve_names() {
            let rows = curve(name).unwrap().unwrap();
            assert!(rows.iter().all(|r| r.analytic.is_some()), "{name}");
        }
        assert_eq!(table1().unwrap().len(), 5);
    }

    #[test]
    fn figure_grouping() {
        assert_eq!(figure_curves(Figure::Fig2).unwrap().len(), 3);
        assert_eq!(figure_curves(Figure::Fig3).unwrap().len(), 4);
        assert_eq!(figure_curves(Figure::Fig4).unwrap().len(), 8);
        assert_eq!(figure_curves(Figure::Fig5).unwrap().len(), 4);
        let fig2 = figure_curves(Figure::Fig2).unwrap();
        assert_eq!(fig2[0].1.len(), 17);
        assert_eq!(fig2[0].1[8].analytic, Some(0.50428));
        assert_eq!(fig2[0].1[8].sim, Some(0.590932));
    }
}
