use std::path::Path;
use std::str::FromStr;

use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// `*TEXT <id> ...` records closed by a final `*STOP`.
    TimeMagazine,
    /// One document per file; the file name is the id.
    DirOfText,
}

impl FromStr for CorpusFormat {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "time" | "timemagazine" => Ok(CorpusFormat::TimeMagazine),
            "dir" | "diroftext" => Ok(CorpusFormat::DirOfText),
            _ => Err(EngineError::Config(format!("unknown corpus format `{s}`"))),
        }
    }
}

pub type Document = (String, String);

pub fn ingest_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Document>, EngineError> {
    let docs = match format {
        CorpusFormat::TimeMagazine => {
            let text = read(path)?;
            parse_star_records(&text, "*TEXT", &path.display().to_string())?
        }
        CorpusFormat::DirOfText => read_dir(path)?,
    };
    if docs.is_empty() {
        return Err(EngineError::EmptyCorpus);
    }
    Ok(docs)
}

/// Queries in the `*FIND <id>` layout of the TIME test collection.
pub fn parse_time_queries(text: &str, file: &str) -> Result<Vec<Document>, EngineError> {
    parse_star_records(text, "*FIND", file)
}

pub(crate) fn read(path: &Path) -> Result<String, EngineError> {
    let bytes = std::fs::read(path).map_err(|source| EngineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn read_dir(dir: &Path) -> Result<Vec<Document>, EngineError> {
    let io = |source| EngineError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((id, read(&p)?))
        })
        .collect()
}

/// Numeric ids lose their leading zeros so that `017` matches `17`.
pub fn canonical_id(raw: &str) -> String {
    if !raw.is_empty() && raw.bytes().all(|b| b.is_ascii_digit()) {
        let trimmed = raw.trim_start_matches('0');
        if trimmed.is_empty() {
            "0".to_string()
        } else {
            trimmed.to_string()
        }
    } else {
        raw.to_string()
    }
}

fn parse_star_records(text: &str, marker: &str, file: &str) -> Result<Vec<Document>, EngineError> {
    let malformed = |line: usize| EngineError::MalformedRecord {
        file: file.to_string(),
        line,
    };
    let mut docs: Vec<Document> = Vec::new();
    let mut current: Option<(String, String)> = None;
    let mut stopped = false;
    let mut last = 0;
    for (i, line) in text.lines().enumerate() {
        last = i + 1;
        let trimmed = line.trim();
        if stopped {
            if trimmed.is_empty() {
                continue;
            }
            return Err(malformed(i + 1));
        }
        if let Some(rest) = trimmed.strip_prefix(marker) {
            let id = rest.split_whitespace().next().ok_or_else(|| malformed(i + 1))?;
            docs.extend(current.take());
            current = Some((canonical_id(id), String::new()));
        } else if trimmed == "*STOP" {
            docs.extend(current.take());
            stopped = true;
        } else if let Some((_, body)) = current.as_mut() {
            body.push_str(line);
            body.push('\n');
        } else if !trimmed.is_empty() {
            return Err(malformed(i + 1));
        }
    }
    if !stopped && (current.is_some() || !docs.is_empty()) {
        return Err(malformed(last));
    }
    Ok(docs)
}
