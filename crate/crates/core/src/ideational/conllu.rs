//! CoNLL-U reader producing one dependency graph per sentence block.

use serde::{Deserialize, Serialize};

use super::IdeationalError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    /// 1-based word index.
    pub index: u32,
    pub pos_tag: String,
}

/// `head == 0` marks the root attachment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub head: u32,
    pub dependent: u32,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    pub sentence_id: String,
    /// Document the sentence belongs to, from `# newdoc id` or `# writing_id` comments.
    pub writing_id: Option<String>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl DependencyGraph {
    pub fn roots(&self) -> usize {
        self.edges.iter().filter(|e| e.head == 0).count()
    }

    /// Build a graph from `(pos_tag, head, relation)` rows with implicit 1-based ids.
    pub fn from_rows(sentence_id: impl Into<String>, rows: &[(&str, u32, &str)]) -> Self {
        DependencyGraph {
            sentence_id: sentence_id.into(),
            writing_id: None,
            nodes: rows
                .iter()
                .enumerate()
                .map(|(i, (pos, _, _))| Node {
                    index: i as u32 + 1,
                    pos_tag: pos.to_string(),
                })
                .collect(),
            edges: rows
                .iter()
                .enumerate()
                .map(|(i, (_, head, rel))| Edge {
                    head: *head,
                    dependent: i as u32 + 1,
                    relation: rel.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralWarning {
    pub sentence_id: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedConllu {
    pub graphs: Vec<DependencyGraph>,
    pub warnings: Vec<StructuralWarning>,
}

struct Block {
    start_line: usize,
    sent_id: Option<String>,
    rows: Vec<(u32, String, u32, String)>,
}

pub fn parse_conllu(input: &str) -> Result<ParsedConllu, IdeationalError> {
    let mut out = ParsedConllu::default();
    let mut doc: Option<String> = None;
    let mut block: Option<Block> = None;
    let mut ordinal = 0usize;

    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(b) = block.take() {
                ordinal += 1;
                finish(b, ordinal, &doc, &mut out);
            }
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                let key = key.trim();
                let value = value.trim().to_string();
                match key {
                    "newdoc id" | "writing_id" => doc = Some(value),
                    "sent_id" => {
                        block
                            .get_or_insert_with(|| Block {
                                start_line: line_no,
                                sent_id: None,
                                rows: Vec::new(),
                            })
                            .sent_id = Some(value)
                    }
                    _ => {}
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(IdeationalError::Parse {
                line: line_no,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let b = block.get_or_insert_with(|| Block {
            start_line: line_no,
            sent_id: None,
            rows: Vec::new(),
        });
        // multiword token ranges and empty nodes carry no tree structure
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: u32 = cols[0].parse().map_err(|_| IdeationalError::Parse {
            line: line_no,
            message: format!("non-integer ID {:?}", cols[0]),
        })?;
        let head: u32 = cols[6].parse().map_err(|_| IdeationalError::Parse {
            line: line_no,
            message: format!("non-integer HEAD {:?}", cols[6]),
        })?;
        b.rows.push((id, cols[3].to_string(), head, cols[7].to_string()));
    }
    if let Some(b) = block.take() {
        ordinal += 1;
        finish(b, ordinal, &doc, &mut out);
    }
    Ok(out)
}

fn finish(block: Block, ordinal: usize, doc: &Option<String>, out: &mut ParsedConllu) {
    if block.rows.is_empty() {
        return;
    }
    let sentence_id = block.sent_id.unwrap_or_else(|| ordinal.to_string());
    let mut warn = |message: String| {
        out.warnings.push(StructuralWarning {
            sentence_id: sentence_id.clone(),
            line: block.start_line,
            message,
        })
    };
    let n = block.rows.len() as u32;
    for (expected, (id, ..)) in (1..).zip(&block.rows) {
        if *id != expected {
            warn(format!("node ids are not consecutive at {id}"));
            break;
        }
    }
    for (id, _, head, _) in &block.rows {
        if *head > n {
            warn(format!("node {id} has head {head} outside the sentence"));
        }
    }
    let roots = block.rows.iter().filter(|r| r.2 == 0).count();
    if roots != 1 {
        warn(format!("{roots} root nodes"));
    }
    let graph = DependencyGraph {
        sentence_id: sentence_id.clone(),
        writing_id: doc.clone(),
        nodes: block
            .rows
            .iter()
            .map(|(id, pos, ..)| Node {
                index: *id,
                pos_tag: pos.clone(),
            })
            .collect(),
        edges: block
            .rows
            .iter()
            .map(|(id, _, head, rel)| Edge {
                head: *head,
                dependent: *id,
                relation: rel.clone(),
            })
            .collect(),
    };
    out.graphs.push(graph);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input() {
        assert!(parse_conllu("").unwrap().graphs.is_empty());
    }

    #[test]
    fn two_token_sentence() {
        let text = "1\t我\t我\tPRON\t_\t_\t2\tnsubj\t_\t_\n2\t笑\t笑\tVERB\t_\t_\t0\troot\t_\t_\n\n";
        let parsed = parse_conllu(text).unwrap();
        assert!(parsed.warnings.is_empty());
        let g = &parsed.graphs[0];
        assert_eq!(
            g.nodes,
            vec![
                Node { index: 1, pos_tag: "PRON".into() },
                Node { index: 2, pos_tag: "VERB".into() }
            ]
        );
        assert_eq!(g.roots(), 1);
        assert!(g.edges.contains(&Edge { head: 0, dependent: 2, relation: "root".into() }));
        assert!(g.edges.contains(&Edge { head: 2, dependent: 1, relation: "nsubj".into() }));
    }

    #[test]
    fn nine_columns_is_an_error() {
        let text = "# sent_id = a\n1\tx\tx\tX\t_\t_\t0\troot\t_\n";
        match parse_conllu(text) {
            Err(IdeationalError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_integer_head() {
        let text = "1\tx\tx\tX\t_\t_\tzero\troot\t_\t_\n";
        assert!(matches!(parse_conllu(text), Err(IdeationalError::Parse { line: 1, .. })));
    }

    #[test]
    fn skips_ranges_and_empty_nodes_and_tracks_docs() {
        let text = "\
# newdoc id = w7
# sent_id = w7-1
1-2\tdu\t_\t_\t_\t_\t_\t_\t_\t_
1\tde\tde\tADP\t_\t_\t3\tcase\t_\t_
2\tle\tle\tDET\t_\t_\t3\tdet\t_\t_
2.1\tx\t_\tX\t_\t_\t_\t_\t_\t_
3\tpain\tpain\tNOUN\t_\t_\t0\troot\t_\t_

# sent_id = w7-2
1\ta\ta\tX\t_\t_\t0\troot\t_\t_
2\tb\tb\tX\t_\t_\t0\troot\t_\t_
";
        let parsed = parse_conllu(text).unwrap();
        assert_eq!(parsed.graphs.len(), 2);
        assert_eq!(parsed.graphs[0].nodes.len(), 3);
        assert_eq!(parsed.graphs[0].writing_id.as_deref(), Some("w7"));
        assert_eq!(parsed.graphs[1].sentence_id, "w7-2");
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.warnings[0].sentence_id, "w7-2");
    }
}
