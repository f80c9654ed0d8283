//! Deterministic prompt parser.
//!
//! The parser finds one action verb, then peels off the clauses it recognises
//! (duration, entry side, the reference-entity phrase) and resolves whatever
//! is left against scene object names to find the subject.

use super::{AnimationIntent, Backend, Direction, IntentError, IntentParseTrace, Mode, Preset, DURATION_RANGE_MS};
use crate::scene::{find_objects_by_name, token_similarity, tokenize, SceneDocument, SceneObject};

/// Animation length when the prompt names none.
pub const DEFAULT_DURATION_MS: u32 = 2000;

/// Longest accepted prompt, in characters.
pub const MAX_PROMPT_CHARS: usize = 2000;

const ARTICLES: &[&str] = &["the", "a", "an"];
const NAME_STOP_WORDS: &[&str] = &["the", "a", "an", "of"];
const PATH_PREPOSITIONS: &[&str] = &["along", "over", "across", "through", "on", "onto"];
const ORBIT_PREPOSITIONS: &[&str] = &["around", "round", "about"];
const PHRASE_STOPS: &[&str] = &["and", "then", "while", "with", "from", "for"];
const LOOP_WORDS: &[&str] = &["forever", "repeatedly", "continuously", "loop", "looping", "endlessly"];
const FILLER: &[&str] = &[
    "make", "let", "have", "please", "can", "could", "would", "you", "should", "to", "so", "that", "it", "text", "object",
    "image", "picture", "layer", "shape", "the", "a", "an", "in", "into", "slowly", "quickly", "smoothly", "gently",
];
const NEAREST_NAMES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Action {
    Path { gallop: bool },
    Orbit,
    Enter(Preset),
    InPlace(Preset),
}

fn lexicon(lemma: &str) -> Option<Action> {
    use Preset::*;
    Some(match lemma {
        "move" | "walk" | "run" | "travel" | "go" | "ride" | "roll" | "drive" | "journey" | "march" => Action::Path { gallop: false },
        "gallop" | "hop" | "trot" => Action::Path { gallop: true },
        "orbit" | "circle" | "revolve" => Action::Orbit,
        "fly" | "enter" => Action::Enter(FlyIn),
        "slide" => Action::Enter(Slide),
        "swoosh" => Action::Enter(Swoosh),
        "fade" => Action::InPlace(FadeIn),
        "appear" => Action::InPlace(Appear),
        "grow" | "enlarge" => Action::InPlace(Grow),
        "shrink" => Action::InPlace(Shrink),
        "rotate" | "turn" => Action::InPlace(Rotate),
        "spin" => Action::InPlace(Spin),
        "bounce" => Action::InPlace(Bounce),
        "dance" => Action::InPlace(Dance),
        "pulse" | "pulsate" | "throb" => Action::InPlace(Pulse),
        "wave" => Action::InPlace(Wave),
        "shake" | "wobble" | "jiggle" => Action::InPlace(Shake),
        "float" | "hover" | "drift" => Action::InPlace(Float),
        "pop" => Action::InPlace(Pop),
        "drop" | "fall" => Action::InPlace(Drop),
        "rise" => Action::InPlace(Rise),
        _ => return None,
    })
}

/// Verb lemma for a word, tolerating simple inflections (`orbits`, `moving`, `faded`).
fn lemma(word: &str) -> Option<(String, Action)> {
    let mut forms = vec![word.to_string()];
    for suffix in ["s", "es", "ing", "ed", "d"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            forms.push(stem.to_string());
            forms.push(format!("{stem}e"));
            // doubled consonant: running, hopped
            if let Some(last) = stem.chars().last() {
                if stem.ends_with(&format!("{last}{last}")) {
                    forms.push(stem[..stem.len() - last.len_utf8()].to_string());
                }
            }
        }
    }
    forms.into_iter().find_map(|f| lexicon(&f).map(|a| (f, a)))
}

#[derive(Clone, Debug)]
struct Word {
    lower: String,
    start: usize,
    end: usize,
    /// Clause punctuation (`,` `;` `.` `!` `?`) rather than a word.
    brk: bool,
}

fn lex(prompt: &str) -> Vec<Word> {
    let chars: Vec<(usize, char)> = prompt.char_indices().collect();
    let mut words = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if c.is_alphanumeric() {
            let mut j = i + 1;
            while j < chars.len() {
                let (_, d) = chars[j];
                let joins = |k: usize| chars.get(k).is_some_and(|&(_, e)| e.is_alphanumeric());
                let inner_dot = d == '.' && chars[j - 1].1.is_ascii_digit() && chars.get(j + 1).is_some_and(|&(_, e)| e.is_ascii_digit());
                let inner_apostrophe = (d == '\'' || d == '’') && joins(j + 1);
                if d.is_alphanumeric() || inner_dot || inner_apostrophe {
                    j += 1;
                } else {
                    break;
                }
            }
            let end = chars.get(j).map_or(prompt.len(), |&(k, _)| k);
            words.push(Word {
                lower: prompt[start..end].to_lowercase(),
                start,
                end,
                brk: false,
            });
            i = j;
        } else {
            if matches!(c, ',' | ';' | '.' | '!' | '?' | ':') {
                words.push(Word {
                    lower: c.to_string(),
                    start,
                    end: start + c.len_utf8(),
                    brk: true,
                });
            }
            i += 1;
        }
    }
    words
}

/// Reject empty and over-long prompts.
pub(crate) fn check_prompt(prompt: &str) -> Result<(), IntentError> {
    if prompt.trim().is_empty() {
        return Err(IntentError::EmptyPrompt);
    }
    let n = prompt.chars().count();
    if n > MAX_PROMPT_CHARS {
        return Err(IntentError::PromptTooLong(n));
    }
    Ok(())
}

/// Occurrence of an object's name in the prompt: word indices `[first, last]` and token count.
#[derive(Clone, Copy, Debug)]
struct NameSpan<'a> {
    object: &'a SceneObject,
    first: usize,
    last: usize,
    tokens: usize,
}

fn name_spans<'a>(words: &[Word], scene: &'a SceneDocument) -> Vec<NameSpan<'a>> {
    // content words: not punctuation, not stop words; a name may not span punctuation
    let content: Vec<usize> = (0..words.len())
        .filter(|&i| !words[i].brk && !NAME_STOP_WORDS.contains(&words[i].lower.as_str()))
        .collect();
    let mut spans = Vec::new();
    for object in &scene.objects {
        let name = tokenize(&object.name);
        if name.is_empty() || name.len() > content.len() {
            continue;
        }
        for w in 0..=content.len() - name.len() {
            let idx = &content[w..w + name.len()];
            let (first, last) = (idx[0], idx[name.len() - 1]);
            let contiguous = !words[first..=last].iter().any(|x| x.brk);
            if contiguous && idx.iter().zip(&name).all(|(&i, t)| words[i].lower == *t) {
                spans.push(NameSpan {
                    object,
                    first,
                    last,
                    tokens: name.len(),
                });
            }
        }
    }
    spans
}

fn duration_unit_ms(unit: &str) -> Option<f64> {
    Some(match unit {
        "ms" | "msec" | "msecs" | "millisecond" | "milliseconds" => 1.0,
        "s" | "sec" | "secs" | "second" | "seconds" => 1000.0,
        "min" | "mins" | "minute" | "minutes" => 60_000.0,
        _ => return None,
    })
}

/// `for|over|in|during N unit`, with the unit optionally glued to the number (`5s`).
/// Returns (first word, last word, milliseconds).
fn find_duration(words: &[Word]) -> Result<Option<(usize, usize, u32)>, IntentError> {
    for i in 0..words.len() {
        if !matches!(words[i].lower.as_str(), "for" | "over" | "in" | "during" | "within") {
            continue;
        }
        let Some(num) = words.get(i + 1) else { continue };
        let split = num.lower.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(num.lower.len());
        let (digits, glued) = num.lower.split_at(split);
        let Ok(value) = digits.parse::<f64>() else { continue };
        let (unit, last) = if glued.is_empty() {
            match words.get(i + 2) {
                Some(u) => (u.lower.as_str(), i + 2),
                None => continue,
            }
        } else {
            (glued, i + 1)
        };
        let Some(scale) = duration_unit_ms(unit) else { continue };
        let ms = (value * scale).round();
        let range = &DURATION_RANGE_MS;
        if !(ms >= f64::from(*range.start()) && ms <= f64::from(*range.end())) {
            return Err(IntentError::Duration(format!(
                "{} is outside {}..={} ms",
                &words[i + 1].lower,
                range.start(),
                range.end()
            )));
        }
        return Ok(Some((i, last, ms as u32)));
    }
    Ok(None)
}

/// `from [the] left|right|top|bottom|above|below [side|edge]`.
fn find_direction(words: &[Word]) -> Option<(usize, usize, Direction)> {
    for i in 0..words.len() {
        if words[i].lower != "from" {
            continue;
        }
        let mut j = i + 1;
        if words.get(j).is_some_and(|w| ARTICLES.contains(&w.lower.as_str())) {
            j += 1;
        }
        let dir = match words.get(j).map(|w| w.lower.as_str()) {
            Some("left") => Direction::Left,
            Some("right") => Direction::Right,
            Some("top" | "above") => Direction::Top,
            Some("bottom" | "below") => Direction::Bottom,
            _ => continue,
        };
        let mut last = j;
        if words.get(j + 1).is_some_and(|w| matches!(w.lower.as_str(), "side" | "edge")) {
            last += 1;
        }
        return Some((i, last, dir));
    }
    None
}

/// Words after `from` up to the end of the clause, with leading articles removed.
fn phrase_after(words: &[Word], from: usize, consumed: &[bool]) -> Option<(usize, usize)> {
    let mut i = from;
    while words.get(i).is_some_and(|w| ARTICLES.contains(&w.lower.as_str())) {
        i += 1;
    }
    let first = i;
    while i < words.len() && !words[i].brk && !consumed[i] && !PHRASE_STOPS.contains(&words[i].lower.as_str()) {
        i += 1;
    }
    (i > first).then(|| (first, i - 1))
}

fn text_of(prompt: &str, words: &[Word], first: usize, last: usize) -> String {
    prompt[words[first].start..words[last].end].to_string()
}

/// Parse with the rule backend only.
pub fn parse_rules(prompt: &str, scene: &SceneDocument) -> Result<(AnimationIntent, IntentParseTrace), IntentError> {
    check_prompt(prompt)?;
    let words = lex(prompt);
    let spans = name_spans(&words, scene);
    let in_name = |i: usize| spans.iter().any(|s| (s.first..=s.last).contains(&i));
    let mut rules = Vec::new();
    let mut warnings = Vec::new();
    let mut consumed = vec![false; words.len()];
    let mark = |consumed: &mut Vec<bool>, a: usize, b: usize| consumed[a..=b].iter_mut().for_each(|c| *c = true);

    // action verb: first lexicon word that is not part of an object's name
    let (verb_at, verb, mut action) = words
        .iter()
        .enumerate()
        .filter(|&(i, w)| !w.brk && !in_name(i))
        .find_map(|(i, w)| lemma(&w.lower).map(|(l, a)| (i, l, a)))
        .ok_or(IntentError::NoActionVerb)?;
    rules.push(format!("verb:{verb}"));
    let mut verb_end = verb_at;
    let next = words.get(verb_at + 1).map(|w| w.lower.as_str());
    match (action, next) {
        (Action::InPlace(Preset::FadeIn), Some("out")) => {
            action = Action::InPlace(Preset::FadeOut);
            verb_end += 1;
        }
        (Action::InPlace(Preset::FadeIn) | Action::Enter(_), Some("in" | "into")) => verb_end += 1,
        _ => {}
    }
    mark(&mut consumed, verb_at, verb_end);

    let duration_ms = match find_duration(&words)? {
        Some((a, b, ms)) => {
            mark(&mut consumed, a, b);
            rules.push("duration:prompt".into());
            ms
        }
        None => {
            rules.push("duration:default".into());
            DEFAULT_DURATION_MS
        }
    };

    let mut direction = None;
    if let Some((a, b, d)) = find_direction(&words) {
        mark(&mut consumed, a, b);
        if matches!(action, Action::Enter(_)) {
            direction = Some(d);
            rules.push(format!("direction:from_{}", d.name()));
        }
    }

    let looping_word = words.iter().position(|w| LOOP_WORDS.contains(&w.lower.as_str()));
    if let Some(i) = looping_word {
        consumed[i] = true;
    }

    // reference entity
    let mut entity = None;
    let prepositions = match action {
        Action::Path { .. } => PATH_PREPOSITIONS,
        Action::Orbit => ORBIT_PREPOSITIONS,
        _ => &[][..],
    };
    let prep_at = (verb_end + 1..words.len()).find(|&i| !consumed[i] && prepositions.contains(&words[i].lower.as_str()));
    match (action, prep_at) {
        (Action::Path { .. } | Action::Orbit, Some(p)) => {
            consumed[p] = true;
            if let Some((a, b)) = phrase_after(&words, p + 1, &consumed) {
                entity = Some(text_of(prompt, &words, a, b));
                mark(&mut consumed, a, b);
                rules.push(format!("entity:after_{}", words[p].lower));
            }
        }
        (Action::Orbit, None) => {
            // "the Moon orbits Earth"
            if let Some((a, b)) = phrase_after(&words, verb_end + 1, &consumed) {
                entity = Some(text_of(prompt, &words, a, b));
                mark(&mut consumed, a, b);
                rules.push("entity:object_of_verb".into());
            }
        }
        _ => {}
    }
    if matches!(action, Action::Path { .. } | Action::Orbit) && entity.is_none() {
        let hint = if action == Action::Orbit { "around" } else { "along" };
        return Err(IntentError::MissingEntity { verb, hint });
    }

    // subject: longest object name among the unconsumed words
    let subject_obj = spans
        .iter()
        .filter(|s| !consumed[s.first..=s.last].iter().any(|&c| c))
        .max_by(|a, b| a.tokens.cmp(&b.tokens).then(b.first.cmp(&a.first)).then_with(|| b.object.id.cmp(&a.object.id)))
        .map(|s| s.object);
    let subject_obj = match subject_obj {
        Some(o) => {
            rules.push("subject:scene_name".into());
            o
        }
        None => {
            let rest: Vec<&str> = (0..words.len())
                .filter(|&i| !consumed[i] && !words[i].brk && !FILLER.contains(&words[i].lower.as_str()))
                .map(|i| &prompt[words[i].start..words[i].end])
                .collect();
            let query = rest.join(" ");
            let hit = if query.is_empty() {
                None
            } else {
                find_objects_by_name(scene, &query).ok().and_then(|hits| hits.first().map(|h| h.object))
            };
            match hit {
                Some(o) => {
                    rules.push("subject:fuzzy_name".into());
                    o
                }
                None => {
                    return Err(IntentError::UnknownSubject {
                        nearest: nearest_names(&query, scene),
                        query,
                    })
                }
            }
        }
    };

    let (mode, preset) = match action {
        Action::Path { gallop } => {
            let preset = if gallop {
                rules.push("preset:gallop_verb".into());
                Preset::Gallop
            } else if subject_obj.has_tag("character") {
                rules.push("preset:character_gallop".into());
                Preset::Gallop
            } else {
                rules.push("preset:custom_path".into());
                Preset::CustomPath
            };
            (Mode::PathFollow, preset)
        }
        Action::Orbit => (Mode::Orbit, Preset::Orbit),
        Action::Enter(p) => {
            if direction.is_none() {
                direction = Some(Direction::Left);
                rules.push("direction:default_left".into());
                warnings.push("no entry side given; entering from the left".to_string());
            }
            (Mode::Directional, p)
        }
        Action::InPlace(p) => (Mode::InPlace, p),
    };

    let looping = if mode == Mode::Orbit {
        rules.push("loop:orbit".into());
        true
    } else if looping_word.is_some() {
        rules.push("loop:keyword".into());
        true
    } else {
        false
    };

    let intent = AnimationIntent {
        subject: subject_obj.name.clone(),
        entity,
        mode,
        preset,
        direction,
        duration_ms,
        looping,
    };
    intent.check()?;
    let trace = IntentParseTrace {
        matched_rules: rules,
        warnings,
        backend: Backend::Rules,
    };
    Ok((intent, trace))
}

fn nearest_names(query: &str, scene: &SceneDocument) -> Vec<String> {
    let q = tokenize(query);
    let mut scored: Vec<(f64, &str)> = scene
        .objects
        .iter()
        .map(|o| (token_similarity(&q, &tokenize(&o.name)), o.name.as_str()))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    scored.into_iter().take(NEAREST_NAMES).map(|(_, n)| n.to_string()).collect()
}
