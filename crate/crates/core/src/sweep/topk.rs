use std::collections::HashSet;
use std::io::{self, Write};

use serde::Serialize;

use super::{SweepError, SweepRecord};
use crate::config::{Configuration, Flag, Tokenizer, TokenizerSet};

/// 1, 2, 4, ..., 512.
pub const DEFAULT_KS: [usize; 10] = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopKRow {
    /// Requested k.
    pub k: usize,
    /// Records actually used; smaller than `k` when truncated.
    pub used: usize,
    /// Minimum accuracy among the top `used` records.
    pub accuracy: f64,
    /// Macro-F1 of the record attaining that minimum.
    pub macro_f1: f64,
    /// Fraction of the top records with each flag on, indexed like
    /// [`Flag::ALL`].
    pub flag_probs: [f64; 15],
    /// Fraction of the top records using each tokenizer, indexed like
    /// [`Tokenizer::ALL`].
    pub tokenizer_probs: [f64; 7],
    pub truncated: bool,
}

impl TopKRow {
    pub fn flag_prob(&self, flag: Flag) -> f64 {
        self.flag_probs[flag.index()]
    }

    pub fn tokenizer_prob(&self, t: Tokenizer) -> f64 {
        let i = Tokenizer::ALL.iter().position(|x| *x == t).expect("known tokenizer");
        self.tokenizer_probs[i]
    }
}

/// Accuracy descending, then config id ascending.
pub fn rank_records(records: &[SweepRecord]) -> Vec<&SweepRecord> {
    let mut ranked: Vec<&SweepRecord> = records.iter().collect();
    ranked.sort_by(|a, b| {
        b.accuracy
            .total_cmp(&a.accuracy)
            .then_with(|| a.config_id.cmp(&b.config_id))
    });
    ranked
}

/// One row per `k`. A `k` larger than the record count uses every record
/// and is marked `truncated`.
pub fn topk(records: &[SweepRecord], ks: &[usize]) -> Result<Vec<TopKRow>, SweepError> {
    if records.is_empty() {
        return Err(SweepError::NoRecords);
    }
    let ranked = rank_records(records);
    let configs = ranked
        .iter()
        .map(|r| {
            r.configuration().map_err(|e| SweepError::Parse {
                path: "<records>".into(),
                line: 0,
                message: format!("{}: {e}", r.config_id),
            })
        })
        .collect::<Result<Vec<Configuration>, _>>()?;

    Ok(ks
        .iter()
        .map(|&k| {
            let used = k.min(ranked.len()).max(1);
            let last = ranked[used - 1];
            let mut flag_counts = [0usize; 15];
            let mut tok_counts = [0usize; 7];
            for c in &configs[..used] {
                for f in c.flags.iter_on() {
                    flag_counts[f.index()] += 1;
                }
                for (i, t) in Tokenizer::ALL.iter().enumerate() {
                    if c.tokenizers.contains(*t) {
                        tok_counts[i] += 1;
                    }
                }
            }
            let n = used as f64;
            TopKRow {
                k,
                used,
                accuracy: last.accuracy,
                macro_f1: last.macro_f1,
                flag_probs: flag_counts.map(|c| c as f64 / n),
                tokenizer_probs: tok_counts.map(|c| c as f64 / n),
                truncated: used < k,
            }
        })
        .collect())
}

/// Tab-separated table: k, accuracy, macro-F1, the flags in
/// [`Flag::TABLE_ORDER`], the tokenizers in [`Tokenizer::TABLE_ORDER`] and
/// a truncation marker.
pub fn write_topk_tsv<W: Write>(rows: &[TopKRow], mut out: W) -> io::Result<()> {
    let mut header = vec!["k".to_string(), "accuracy".into(), "macro-F1".into()];
    header.extend(Flag::TABLE_ORDER.iter().map(|f| f.name().to_string()));
    header.extend(Tokenizer::TABLE_ORDER.iter().map(|t| t.name().to_string()));
    header.push("truncated".into());
    writeln!(out, "{}", header.join("\t"))?;
    for r in rows {
        let mut cells = vec![r.k.to_string(), format!("{:.4}", r.accuracy), format!("{:.4}", r.macro_f1)];
        cells.extend(Flag::TABLE_ORDER.iter().map(|f| format!("{:.4}", r.flag_prob(*f))));
        cells.extend(Tokenizer::TABLE_ORDER.iter().map(|t| format!("{:.4}", r.tokenizer_prob(*t))));
        cells.push(if r.truncated { format!("{}", r.used) } else { "-".into() });
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}

/// Crosses the flag assignments of the `m` best records with every
/// tokenizer subset, dropping duplicates while keeping rank order.
pub fn expand_combinations(records: &[SweepRecord], m: usize) -> Result<Vec<Configuration>, SweepError> {
    let ranked = rank_records(records);
    let subsets = TokenizerSet::all_subsets();
    let mut seen_flags = HashSet::new();
    let mut out = Vec::new();
    for r in ranked.into_iter().take(m) {
        let config = r.configuration().map_err(|e| SweepError::Parse {
            path: "<records>".into(),
            line: 0,
            message: format!("{}: {e}", r.config_id),
        })?;
        if seen_flags.insert(config.flags) {
            out.extend(subsets.iter().map(|t| Configuration::new(config.flags, *t)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FlagSet;
    use crate::sweep::Split;

    fn rec(config: Configuration, accuracy: f64) -> SweepRecord {
        SweepRecord {
            config_id: config.config_id(),
            split: Split::TrainCv,
            accuracy,
            macro_f1: accuracy / 2.0,
            per_fold: Vec::new(),
            wall_time: None,
        }
    }

    fn w1(ordinal: u32) -> Configuration {
        Configuration::new(FlagSet::from_ordinal(ordinal), TokenizerSet::single(Tokenizer::W1))
    }

    #[test]
    fn rows_shape() {
        let records: Vec<SweepRecord> = (0..10).map(|i| rec(w1(i), f64::from(i) / 10.0)).collect();
        let rows = topk(&records, &[1, 2, 4, 16]).unwrap();
        assert_eq!(rows[0].accuracy, 0.9);
        assert_eq!(rows[1].accuracy, 0.8);
        assert_eq!(rows[1].macro_f1, 0.4);
        assert!(rows[0].flag_probs.iter().all(|p| *p == 0.0 || *p == 1.0));
        assert!(rows.windows(2).all(|w| w[0].accuracy >= w[1].accuracy));
        assert!(rows[3].truncated && rows[3].used == 10);
        assert_eq!(rows[3].tokenizer_prob(Tokenizer::W1), 1.0);
        assert!(topk(&[], &[1]).is_err());
    }

    #[test]
    fn ties_break_on_config_id() {
        let records = vec![rec(w1(5), 0.5), rec(w1(1), 0.5), rec(w1(3), 0.5)];
        let ranked = rank_records(&records);
        assert_eq!(ranked[0].config_id, w1(1).config_id());
        assert_eq!(ranked[2].config_id, w1(5).config_id());
    }

    #[test]
    fn tsv_layout() {
        let records = vec![rec(w1(0), 0.61234)];
        let mut out = Vec::new();
        write_topk_tsv(&topk(&records, &[1, 2]).unwrap(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("k\taccuracy\tmacro-F1\ttfidf\tdel-sw\t"));
        assert_eq!(lines[0].split('\t').count(), 3 + 15 + 7 + 1);
        assert!(lines[1].starts_with("1\t0.6123\t"));
        assert!(lines[1].ends_with("\t-"));
        assert!(lines[2].ends_with("\t1"));
    }

    #[test]
    fn expansion_counts() {
        let records: Vec<SweepRecord> = (0..40).map(|i| rec(w1(i), f64::from(i))).collect();
        assert_eq!(expand_combinations(&records, 32).unwrap().len(), 4064);
        assert_eq!(expand_combinations(&records, 1).unwrap().len(), 127);
        assert_eq!(expand_combinations(&records, 100).unwrap().len(), 40 * 127);

        let q3 = Configuration::new(FlagSet::from_ordinal(39), TokenizerSet::single(Tokenizer::Q3));
        let mut dup = records.clone();
        dup.push(rec(q3, 100.0));
        assert_eq!(expand_combinations(&dup, 2).unwrap().len(), 127);
    }
}
