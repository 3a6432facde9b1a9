//! MediaWiki export XML parsing.
//!
//! Reads the standard export schema (`page` elements with `revision/text`
//! bodies) and turns each page into a [`PersonRecord`]. Dates come from
//! persondata fields and `NNNN births`/`NNNN deaths` categories,
//! identifiers from `{{Authority control}}` parameters, tokens from the
//! page text via [`stem::tokenize`]. Activity metrics (age, views,
//! revision rate) are not present in a single-revision export and default
//! to zero/absent; normalized person files carry them.

use std::io::BufRead;
use std::str::FromStr;
use std::sync::LazyLock;

use quick_xml::events::Event;
use quick_xml::Reader;
use regex::Regex;

use super::stem;
use super::{DeathDate, IdentifierTag, PersonRecord};
use crate::error::{Error, Result};

/// Pages skipped by [`parse_dump_fixture`], by reason.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DumpSkips {
    /// No birth date, no death date, no bibliographic identifier.
    pub inclusion_rule: u64,
    /// Death before the year 1000 without a bibliographic identifier.
    pub early_death: u64,
    /// Page carried no `revision/text` element.
    pub missing_text: u64,
}

impl DumpSkips {
    pub fn total(&self) -> u64 {
        self.inclusion_rule + self.early_death + self.missing_text
    }
}

/// Result of parsing one export stream.
#[derive(Debug, Clone, Default)]
pub struct DumpParse {
    pub records: Vec<PersonRecord>,
    pub skips: DumpSkips,
}

static CATEGORY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\[\[\s*[Cc]ategory\s*:\s*([^\]|]+?)\s*(?:\|[^\]]*)?\]\]").unwrap()
});
static YEAR_EVENT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{1,4})\s+(births|deaths)$").unwrap());
static PERSONDATA_DATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\|\s*DATE OF (BIRTH|DEATH)\s*=\s*([^|}\n]*)").unwrap());
static AUTHORITY_BLOCK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?is)\{\{\s*Authority control\b(.*?)\}\}").unwrap());
static AUTHORITY_PARAM: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(BNF|GND|ISNI|LCCN|NLA|SELIBR|ULAN|VIAF)\s*=\s*([^|}\s]+)").unwrap()
});
static IDENTIFIER_TEMPLATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\{\{\s*(BNF|GND|ISNI|LCCN|NLA|SELIBR|ULAN|VIAF)\s*\|[^}]*\}\}").unwrap()
});
static GOOD_ARTICLE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\{\{\s*good article\s*\}\}").unwrap());
static FEATURED_ARTICLE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\{\{\s*featured article\s*\}\}").unwrap());
static ISO_DATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{1,4})-(\d{1,2})-(\d{1,2})$").unwrap());
static DAY_MONTH_YEAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^(\d{1,2})\s+([a-z]+)\s+(\d{1,4})$").unwrap());
static MONTH_DAY_YEAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^([a-z]+)\s+(\d{1,2}),?\s+(\d{1,4})$").unwrap());
static YEAR_ONLY: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\d{1,4})$").unwrap());

fn month_number(name: &str) -> Option<u8> {
    const MONTHS: [&str; 12] = [
        "january",
        "february",
        "march",
        "april",
        "may",
        "june",
        "july",
        "august",
        "september",
        "october",
        "november",
        "december",
    ];
    let lower = name.to_lowercase();
    MONTHS.iter().position(|m| *m == lower).map(|i| i as u8 + 1)
}

/// Parse the date conventions seen in persondata fields: `28 March 1941`,
/// `March 28, 1941`, `1941-03-28`, or a bare year.
fn parse_flexible_date(raw: &str) -> Option<(i32, Option<u8>, Option<u8>)> {
    let s = raw.trim().trim_matches(|c| c == '[' || c == ']').trim();
    if s.is_empty() {
        return None;
    }
    if let Some(c) = ISO_DATE.captures(s) {
        let year = c[1].parse().ok()?;
        let month: u8 = c[2].parse().ok()?;
        let day: u8 = c[3].parse().ok()?;
        if (1..=12).contains(&month) && (1..=31).contains(&day) {
            return Some((year, Some(month), Some(day)));
        }
        return None;
    }
    if let Some(c) = DAY_MONTH_YEAR.captures(s) {
        let day: u8 = c[1].parse().ok()?;
        let month = month_number(&c[2])?;
        let year = c[3].parse().ok()?;
        if (1..=31).contains(&day) {
            return Some((year, Some(month), Some(day)));
        }
        return None;
    }
    if let Some(c) = MONTH_DAY_YEAR.captures(s) {
        let month = month_number(&c[1])?;
        let day: u8 = c[2].parse().ok()?;
        let year = c[3].parse().ok()?;
        if (1..=31).contains(&day) {
            return Some((year, Some(month), Some(day)));
        }
        return None;
    }
    if let Some(c) = YEAR_ONLY.captures(s) {
        return Some((c[1].parse().ok()?, None, None));
    }
    None
}

/// Extract a [`PersonRecord`] from a page title and wikitext body.
fn record_from_page(title: &str, text: &str) -> PersonRecord {
    let mut record = PersonRecord::blank(title, title);
    record.article_length_bytes = text.len() as u64;

    let mut birth: Option<(i32, Option<u8>, Option<u8>)> = None;
    let mut death: Option<(i32, Option<u8>, Option<u8>)> = None;
    for c in PERSONDATA_DATE.captures_iter(text) {
        let parsed = parse_flexible_date(&c[2]);
        if c[1].eq_ignore_ascii_case("birth") {
            birth = birth.or(parsed);
        } else {
            death = death.or(parsed);
        }
    }

    let mut category_count = 0u32;
    for c in CATEGORY.captures_iter(text) {
        category_count += 1;
        if let Some(ev) = YEAR_EVENT.captures(c[1].trim()) {
            let year: i32 = ev[1].parse().unwrap_or(0);
            match &ev[2] {
                "births" => birth = birth.or(Some((year, None, None))),
                _ => death = death.or(Some((year, None, None))),
            }
        }
    }
    record.category_count = category_count;
    record.birth_year = birth.map(|(y, _, _)| y);
    record.death_date = death.map(|(year, month, day)| DeathDate { year, month, day });

    for block in AUTHORITY_BLOCK.captures_iter(text) {
        for param in AUTHORITY_PARAM.captures_iter(&block[1]) {
            if let Ok(tag) = IdentifierTag::from_str(&param[1]) {
                record.identifiers.insert(tag);
            }
        }
    }
    for template in IDENTIFIER_TEMPLATE.captures_iter(text) {
        if let Ok(tag) = IdentifierTag::from_str(&template[1]) {
            record.identifiers.insert(tag);
        }
    }

    record.good_article = GOOD_ARTICLE.is_match(text);
    record.featured_article = FEATURED_ARTICLE.is_match(text);
    record.tokens = stem::tokenize(text);
    record
}

/// Parse a MediaWiki export stream into person records.
///
/// Pages failing the inclusion rule (no birth date, death date, or
/// identifier; or pre-1000 death without identifier) and pages without a
/// text element are skipped and counted. Malformed XML is an error carrying
/// the byte offset.
pub fn parse_dump_fixture<R: BufRead>(input: R) -> Result<DumpParse> {
    let mut reader = Reader::from_reader(input);
    let config = reader.config_mut();
    config.trim_text(true);

    let mut out = DumpParse::default();
    let mut buf = Vec::new();

    let mut in_page = false;
    let mut in_revision = false;
    let mut capture: Option<&'static str> = None;
    let mut title: Option<String> = None;
    let mut text: Option<String> = None;

    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| Error::Xml {
            offset: reader.buffer_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(ref e) => match e.local_name().as_ref() {
                b"page" => {
                    in_page = true;
                    in_revision = false;
                    title = None;
                    text = None;
                }
                b"revision" if in_page => in_revision = true,
                b"title" if in_page && !in_revision => capture = Some("title"),
                b"text" if in_revision => {
                    capture = Some("text");
                    text.get_or_insert_with(String::new);
                }
                _ => {}
            },
            Event::Empty(ref e) => {
                if e.local_name().as_ref() == b"text" && in_revision {
                    text.get_or_insert_with(String::new);
                }
            }
            Event::Text(t) => {
                if let Some(field) = capture {
                    let chunk = t.unescape().map_err(|e| Error::Xml {
                        offset: reader.buffer_position(),
                        message: e.to_string(),
                    })?;
                    match field {
                        "title" => title.get_or_insert_with(String::new).push_str(&chunk),
                        _ => text.get_or_insert_with(String::new).push_str(&chunk),
                    }
                }
            }
            Event::CData(t) => {
                if capture == Some("text") {
                    let chunk = String::from_utf8_lossy(&t).into_owned();
                    text.get_or_insert_with(String::new).push_str(&chunk);
                }
            }
            Event::End(ref e) => match e.local_name().as_ref() {
                b"title" | b"text" => capture = None,
                b"revision" => in_revision = false,
                b"page" => {
                    in_page = false;
                    let page_title = title.take().unwrap_or_default();
                    match text.take() {
                        None => out.skips.missing_text += 1,
                        Some(body) => {
                            let record = record_from_page(&page_title, &body);
                            let has_any = record.birth_year.is_some()
                                || record.death_date.is_some()
                                || !record.identifiers.is_empty();
                            if !has_any {
                                out.skips.inclusion_rule += 1;
                            } else if !record.passes_inclusion_rule() {
                                out.skips.early_death += 1;
                            } else {
                                out.records.push(record);
                            }
                        }
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page(title: &str, body: &str) -> String {
        format!(
            "<page><title>{title}</title><ns>0</ns><id>1</id>\
             <revision><id>2</id><text xml:space=\"preserve\">{body}</text></revision></page>"
        )
    }

    fn export(pages: &str) -> String {
        format!(
            "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\">\
             <siteinfo><sitename>Fixture</sitename></siteinfo>{pages}</mediawiki>"
        )
    }

    #[test]
    fn page_with_death_category_and_viaf() {
        let body = "Novelist and essayist. {{Authority control|VIAF=12345|GND=4066}}\n\
                    [[Category:1941 deaths]] [[Category:English writers]]";
        let xml = export(&page("Ada Writer", body));
        let parsed = parse_dump_fixture(xml.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        let r = &parsed.records[0];
        assert_eq!(r.person_id, "Ada Writer");
        assert_eq!(r.death_date, Some(DeathDate::year_only(1941)));
        assert!(r.identifiers.contains(&IdentifierTag::Viaf));
        assert!(r.identifiers.contains(&IdentifierTag::Gnd));
        assert_eq!(r.category_count, 2);
        assert!(r.tokens.contains(&"novelist".to_string()));
        assert_eq!(parsed.skips.total(), 0);
    }

    #[test]
    fn persondata_dates_take_precedence() {
        let body = "{{Persondata\n| NAME = Ada\n| DATE OF BIRTH = 25 January 1882\n\
                    | DATE OF DEATH = 28 March 1941\n}}\n[[Category:1940 deaths]]";
        let xml = export(&page("Ada", body));
        let parsed = parse_dump_fixture(xml.as_bytes()).unwrap();
        let r = &parsed.records[0];
        assert_eq!(r.birth_year, Some(1882));
        assert_eq!(
            r.death_date,
            Some(DeathDate {
                year: 1941,
                month: Some(3),
                day: Some(28)
            })
        );
    }

    #[test]
    fn direct_identifier_template_is_recognized() {
        let body = "Poet. {{VIAF|314159}} and a stray {{LCCN|n79-12345}} reference.\n\
                    [[Category:1930 deaths]]";
        let parsed = parse_dump_fixture(export(&page("Terse Poet", body)).as_bytes()).unwrap();
        let r = &parsed.records[0];
        assert!(r.identifiers.contains(&IdentifierTag::Viaf));
        assert!(r.identifiers.contains(&IdentifierTag::Lccn));
    }

    #[test]
    fn page_without_dates_or_identifiers_is_skipped_and_counted() {
        let xml = export(&page("Mysterious", "No dates here at all."));
        let parsed = parse_dump_fixture(xml.as_bytes()).unwrap();
        assert!(parsed.records.is_empty());
        assert_eq!(parsed.skips.inclusion_rule, 1);
    }

    #[test]
    fn empty_export_yields_empty_list_and_zero_skips() {
        let parsed = parse_dump_fixture(export("").as_bytes()).unwrap();
        assert!(parsed.records.is_empty());
        assert_eq!(parsed.skips.total(), 0);
    }

    #[test]
    fn missing_text_element_is_counted() {
        let xml = export("<page><title>Broken</title><revision><id>9</id></revision></page>");
        let parsed = parse_dump_fixture(xml.as_bytes()).unwrap();
        assert!(parsed.records.is_empty());
        assert_eq!(parsed.skips.missing_text, 1);
    }

    #[test]
    fn pre_1000_death_needs_identifier() {
        let sage = page("Ancient Sage", "[[Category:850 deaths]]");
        let keeper = page(
            "Ancient Keeper",
            "[[Category:850 deaths]] {{Authority control|VIAF=77}}",
        );
        let parsed = parse_dump_fixture(export(&format!("{sage}{keeper}")).as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.records[0].person_id, "Ancient Keeper");
        assert_eq!(parsed.skips.early_death, 1);
    }

    #[test]
    fn malformed_xml_reports_byte_offset() {
        let xml = "<mediawiki><page><title>Oops</literal>";
        let err = parse_dump_fixture(xml.as_bytes()).unwrap_err();
        match err {
            Error::Xml { offset, .. } => assert!(offset > 0),
            other => panic!("expected Xml error, got {other:?}"),
        }
    }

    #[test]
    fn flexible_date_formats() {
        assert_eq!(
            parse_flexible_date("28 March 1941"),
            Some((1941, Some(3), Some(28)))
        );
        assert_eq!(
            parse_flexible_date("March 28, 1941"),
            Some((1941, Some(3), Some(28)))
        );
        assert_eq!(
            parse_flexible_date("1941-03-28"),
            Some((1941, Some(3), Some(28)))
        );
        assert_eq!(parse_flexible_date("1941"), Some((1941, None, None)));
        assert_eq!(parse_flexible_date("unknown"), None);
        assert_eq!(parse_flexible_date(""), None);
    }
}
