//! Word vectors as text: a word then its components, space-separated, one
//! word per line. A leading `count dimension` header line is skipped.

use recipe_iot_core::lexicon::EmbeddingTable;

use crate::error::{Error, Result};

pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable> {
    let mut table: Option<EmbeddingTable> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut parts = raw.split_whitespace();
        let Some(word) = parts.next() else { continue };
        let values: Vec<&str> = parts.collect();
        if i == 0 && values.len() == 1 && word.parse::<usize>().is_ok() && values[0].parse::<usize>().is_ok() {
            continue;
        }
        let vector = values
            .iter()
            .map(|v| v.parse::<f32>())
            .collect::<Result<Vec<f32>, _>>()
            .map_err(|e| Error::parse(line, format!("bad component: {e}")))?;
        let t = match &mut table {
            Some(t) => t,
            None => table.insert(EmbeddingTable::new(vector.len()).map_err(|e| Error::parse(line, e.to_string()))?),
        };
        t.insert(word, &vector).map_err(|e| Error::parse(line, e.to_string()))?;
    }
    table.ok_or_else(|| Error::parse(0, "no vectors"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_neighbors() {
        let t = parse_embeddings("3 2\noven 1 0\nstove 0.9 0.1\nspoon 0 1\n").unwrap();
        assert_eq!(t.len(), 3);
        let top = t.expand("oven", 1).unwrap();
        assert_eq!(top[0].0, "stove");
        assert!((top[0].1 - 0.99388).abs() < 1e-4);
    }

    #[test]
    fn ragged_rows_fail() {
        let e = parse_embeddings("oven 1 0\nstove 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_embeddings("").is_err());
        assert!(parse_embeddings("oven x y\n").is_err());
    }
}
