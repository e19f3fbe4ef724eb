//! Synthetic commit corpus and a brute-force recount of every aggregate.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use microcommit::analytics::{
    accum_curve, corrective_comparison, heatmap, hunk_distribution, intersection, modification_patterns, summary,
    token_frequencies, Population, TokenScope,
};
use microcommit::detect::Thresholds;
use microcommit::diff::{diff, diff_by_key};
use microcommit::lex::{Language, Lexeme, TokenType};
use microcommit::maintenance::Classifier;
use microcommit::miner::{CommitRecord, FileChange, SourceLine};
use microcommit::pipeline;
use microcommit::store::Store;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MESSAGES: &[(&str, bool)] = &[
    ("fix crash on exit", true),
    ("add feature flag", false),
    ("tidy", false),
    ("update docs", false),
    ("resolve bug in parser", true),
];

fn vocab() -> Vec<Lexeme> {
    vec![
        Lexeme::new(TokenType::Name, "x"),
        Lexeme::new(TokenType::Name, "y"),
        Lexeme::new(TokenType::Name, "count"),
        Lexeme::new(TokenType::Literal, "0"),
        Lexeme::new(TokenType::Literal, "1"),
        Lexeme::new(TokenType::Operator, "="),
        Lexeme::new(TokenType::Operator, "+"),
        Lexeme::new(TokenType::ExprStmt, ";"),
        Lexeme::new(TokenType::Specifier, "static"),
        Lexeme::new(TokenType::ArgumentList, "("),
        Lexeme::new(TokenType::ArgumentList, ")"),
        Lexeme::new(TokenType::Block, "{"),
    ]
}

fn mutate<T: Clone>(rng: &mut ChaCha8Rng, old: &[T], pool: &[T], edits: usize) -> Vec<T> {
    let mut new = old.to_vec();
    for _ in 0..edits {
        let op = rng.gen_range(0..3);
        if op == 0 || new.is_empty() {
            let at = rng.gen_range(0..=new.len());
            new.insert(at, pool[rng.gen_range(0..pool.len())].clone());
        } else if op == 1 {
            new.remove(rng.gen_range(0..new.len()));
        } else {
            let at = rng.gen_range(0..new.len());
            new[at] = pool[rng.gen_range(0..pool.len())].clone();
        }
    }
    new
}

pub fn corpus(n: usize) -> (Vec<CommitRecord>, HashSet<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let vocab = vocab();
    let line_pool: Vec<SourceLine> = ["a();", "b = 1;", "}", "return x;", "int y;"]
        .iter()
        .map(|t| SourceLine {
            number: 1,
            text: t.to_string(),
        })
        .collect();
    let mut records = Vec::new();
    let mut corrective = HashSet::new();
    for i in 0..n {
        let n_files = if rng.gen_bool(0.8) { 1 } else { rng.gen_range(2..4) };
        let mut files = Vec::new();
        for f in 0..n_files {
            let len = rng.gen_range(0..25);
            let old: Vec<Lexeme> = (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())].clone()).collect();
            let edits = if rng.gen_bool(0.6) {
                rng.gen_range(0..4)
            } else {
                rng.gen_range(0..12)
            };
            let new = mutate(&mut rng, &old, &vocab, edits);
            let old_lines: Vec<SourceLine> = (0..rng.gen_range(1..6))
                .map(|_| line_pool[rng.gen_range(0..5)].clone())
                .collect();
            let line_edits = rng.gen_range(1..4);
            let mut new_lines = mutate(&mut rng, &old_lines, &line_pool, line_edits);
            let mut line_diff = diff_by_key(&old_lines, &new_lines, |l| l.text.as_str());
            if line_diff.is_empty() {
                new_lines.push(SourceLine {
                    number: 99,
                    text: "extra();".into(),
                });
                line_diff = diff_by_key(&old_lines, &new_lines, |l| l.text.as_str());
            }
            files.push(FileChange {
                path: format!("src/f{f}.c"),
                language: Language::C,
                line_diff,
                token_diff: diff(&old, &new),
            });
        }
        let (message, fix) = MESSAGES[rng.gen_range(0..MESSAGES.len())];
        let id = format!("{i:040x}");
        if fix {
            corrective.insert(id.clone());
        }
        records.push(CommitRecord {
            commit_id: id,
            seq: i as u64,
            message: message.to_string(),
            timestamp: 1_000_000 + i as i64,
            is_merge: false,
            files,
        });
    }
    (records, corrective)
}

struct Scan<'a> {
    r: &'a CommitRecord,
    added: usize,
    removed: usize,
    hunks: usize,
}

impl Scan<'_> {
    fn micro(&self) -> bool {
        self.r.files.len() == 1 && self.added <= 5 && self.removed <= 5
    }

    fn one_line(&self) -> bool {
        let hunks: Vec<_> = self.r.files.iter().flat_map(|f| &f.line_diff.hunks).collect();
        hunks.len() == 1 && hunks[0].added.len() == 1 && hunks[0].removed.len() == 1
    }

    fn one_token(&self) -> bool {
        self.micro() && self.added == 1 && self.removed == 1
    }

    fn tokens(&self) -> impl Iterator<Item = (&Lexeme, bool)> {
        self.r.files.iter().flat_map(|f| &f.token_diff.hunks).flat_map(|h| {
            h.removed
                .iter()
                .map(|t| (t, false))
                .chain(h.added.iter().map(|t| (t, true)))
        })
    }
}

fn scan(r: &CommitRecord) -> Scan<'_> {
    let hunks: Vec<_> = r.files.iter().flat_map(|f| &f.token_diff.hunks).collect();
    Scan {
        r,
        added: hunks.iter().map(|h| h.added.len()).sum(),
        removed: hunks.iter().map(|h| h.removed.len()).sum(),
        hunks: hunks.len(),
    }
}

/// Checks every aggregate table against a direct scan of `n` generated
/// commits. Panics on the first mismatch; returns a short description.
pub fn check_aggregates(n: usize) -> String {
    let started = Instant::now();
    let (records, corrective) = corpus(n);
    let mut store = Store::open_in_memory().unwrap();
    store.put_batch(&records).unwrap();
    pipeline::detect(&mut store, &Thresholds::default()).unwrap();
    pipeline::classify_maintenance(&mut store, &Classifier::default()).unwrap();
    let scans: Vec<Scan> = records.iter().map(scan).collect();
    let micro: Vec<&Scan> = scans.iter().filter(|s| s.micro()).collect();
    let one_line: Vec<&Scan> = scans.iter().filter(|s| s.one_line()).collect();
    assert!(micro.len() > 100 && one_line.len() > 20, "corpus too thin");

    for (pop, group) in [
        (Population::Studied, scans.iter().collect::<Vec<_>>()),
        (Population::OneLine, one_line.clone()),
    ] {
        let h = heatmap(&store, pop, 10).unwrap();
        assert_eq!(h.population_size as usize, group.len());
        let mut total = 0;
        for a in 0..=10 {
            for r in 0..=10 {
                let n = group.iter().filter(|s| s.added == a && s.removed == r).count();
                assert_eq!(h.count(a, r) as usize, n, "{pop} cell ({a},{r})");
                total += n;
            }
        }
        assert_eq!(h.tail as usize, group.len() - total);
        let sum: f64 = (0..=10)
            .flat_map(|a| (0..=10).map(move |r| (a, r)))
            .map(|(a, r)| h.proportion(a, r))
            .sum();
        assert!((sum + h.tail_proportion() - 1.0).abs() < 1e-9);

        let c = accum_curve(&store, pop, 10).unwrap();
        for t in 0..=10 {
            let n = group.iter().filter(|s| s.added.max(s.removed) <= t).count();
            assert_eq!(c.points[t].1 as usize, n);
            assert!(t == 0 || c.at(t) >= c.at(t - 1));
        }
    }

    let hd = hunk_distribution(&store, Population::Micro, 10).unwrap();
    for t in 0..=10 {
        assert_eq!(hd.points[t].1 as usize, micro.iter().filter(|s| s.hunks <= t).count());
    }

    let mut types: HashMap<String, u64> = HashMap::new();
    let mut tokens: HashMap<String, u64> = HashMap::new();
    let mut patterns: HashMap<String, u64> = HashMap::new();
    for s in &micro {
        let (mut rm, mut ad): (Vec<String>, Vec<String>) = (Vec::new(), Vec::new());
        for (t, added) in s.tokens() {
            *types.entry(t.kind.to_string()).or_default() += 1;
            *tokens.entry(t.to_string()).or_default() += 1;
            if added {
                ad.push(t.kind.to_string())
            } else {
                rm.push(t.kind.to_string())
            }
        }
        rm.sort();
        ad.sort();
        *patterns
            .entry(format!("{{{}}} -> {{{}}}", rm.join(","), ad.join(",")))
            .or_default() += 1;
    }
    let tf = token_frequencies(&store, TokenScope::Types, Population::Micro).unwrap();
    assert_eq!(tf.as_map(), types);
    assert_eq!(tf.denominator, types.values().sum::<u64>());
    assert!(tf.rows.windows(2).all(|w| w[0].n >= w[1].n));
    assert_eq!(
        token_frequencies(&store, TokenScope::Tokens, Population::Micro)
            .unwrap()
            .as_map(),
        tokens
    );
    let mp = modification_patterns(&store, Population::Micro).unwrap();
    assert_eq!(mp.as_map(), patterns);
    assert_eq!(mp.denominator as usize, micro.len());

    let i = intersection(&store).unwrap();
    let both = scans.iter().filter(|s| s.micro() && s.one_line()).count();
    assert_eq!(
        (i.n_intersect as usize, i.n_one_line as usize, i.n_micro as usize),
        (both, one_line.len(), micro.len())
    );
    assert!(i.n_intersect <= i.n_one_line.min(i.n_micro));

    let cc = corrective_comparison(&store).unwrap();
    let cm = micro.iter().filter(|s| corrective.contains(&s.r.commit_id)).count();
    let cn = scans
        .iter()
        .filter(|s| !s.micro() && corrective.contains(&s.r.commit_id))
        .count();
    assert_eq!((cc.n_micro as usize, cc.n_corrective_micro as usize), (micro.len(), cm));
    assert_eq!(
        (cc.n_non_micro as usize, cc.n_corrective_non_micro as usize),
        (scans.len() - micro.len(), cn)
    );
    assert!((cc.pct_corrective_micro - cm as f64 / micro.len() as f64).abs() < 1e-12);

    let sm = summary(&store).unwrap();
    assert_eq!(sm.n_studied as usize, scans.len());
    assert_eq!(sm.n_one_token as usize, scans.iter().filter(|s| s.one_token()).count());
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 60.0, "took {secs:.1} s");
    format!(
        "{} commits, {} micro, {} one-line, {secs:.2} s",
        scans.len(),
        micro.len(),
        one_line.len()
    )
}
