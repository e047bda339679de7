use pdqi_core::analytics::{ScoreStats, SummaryReport};
use pdqi_core::Origin;
use std::fmt::Write;

fn opt(v: Option<f64>, places: usize) -> String {
    v.map(|v| format!("{v:.places$}"))
        .unwrap_or_else(|| "-".into())
}

fn stats_line(out: &mut String, label: &str, s: &ScoreStats) {
    let _ = writeln!(
        out,
        "  {label:<24}{:>6}{:>9}{:>9}",
        s.n,
        opt(s.mean, 3),
        opt(s.sd, 3)
    );
}

/// Aligned text rendering of a summary report.
pub fn render_stats(report: &SummaryReport, by_origin: bool, kappa: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Evaluations: {}  Evaluators: {}  Documents: {}",
        report.evaluation_count, report.evaluator_count, report.document_count
    );
    if report.evaluation_count == 0 {
        out.push_str("no evaluations\n");
        return out;
    }

    let _ = writeln!(
        out,
        "\nCriterion scores\n  {:<24}{:>6}{:>9}{:>9}",
        "criterion", "n", "mean", "sd"
    );
    for (i, c) in report.criteria.iter().enumerate() {
        stats_line(
            &mut out,
            &format!("{}. {}", i + 1, c.criterion.as_str()),
            &c.stats,
        );
    }
    stats_line(&mut out, "total", &report.total);

    if by_origin {
        let _ = writeln!(out, "\nTotal score by perceived origin");
        for g in &report.by_origin {
            stats_line(&mut out, g.origin.as_str(), &g.stats);
        }
        match &report.welch {
            Some(t) => {
                let _ = writeln!(
                    out,
                    "  Welch t-test, human vs ai: t = {:.4}, df = {:.3}, p = {:.6}",
                    t.t, t.df, t.p
                );
            }
            None => out.push_str("  Welch t-test, human vs ai: not available\n"),
        }
        match &report.anova {
            Some(a) => {
                let _ = writeln!(
                    out,
                    "  One-way ANOVA across origins: F = {:.4}, df = ({}, {}), p = {:.6}",
                    a.f, a.df1, a.df2, a.p
                );
            }
            None => out.push_str("  One-way ANOVA across origins: not available\n"),
        }
        match &report.confusion {
            Some(c) => {
                let _ = writeln!(
                    out,
                    "\nPerceived origin by true origin\n  {:<8}{:>8}{:>8}{:>8}",
                    "", "human", "ai", "unsure"
                );
                for (truth, row) in [Origin::Human, Origin::Ai].iter().zip(c.matrix) {
                    let _ = writeln!(
                        out,
                        "  {:<8}{:>8}{:>8}{:>8}",
                        truth.as_str(),
                        row[0],
                        row[1],
                        row[2]
                    );
                }
                let _ = writeln!(out, "  accuracy (excluding unsure): {}", opt(c.accuracy, 3));
            }
            None => out.push_str("  origin accuracy: not available (ground truth incomplete)\n"),
        }
    }

    if kappa {
        out.push_str("\nInter-rater agreement (quadratic weighted kappa)\n");
        match &report.agreement {
            Some(a) => {
                let _ = writeln!(out, "  rater pairs: {}", a.rater_pairs);
                for c in &a.criteria {
                    let _ = writeln!(
                        out,
                        "  {:<24}{:>9}  ({} pairs)",
                        c.criterion.as_str(),
                        opt(c.mean_kappa, 3),
                        c.pairs_used
                    );
                }
            }
            None => out.push_str("  insufficient raters\n"),
        }
    }
    out
}
