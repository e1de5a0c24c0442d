//! The five textual formats a question can be presented in. Instantiations
//! are byte-exact against the golden files under `tests/golden/`; edit with
//! care, indentation is significant (tabs inside the code templates).

use crate::types::{AnswerExtractionSpec, ExtractionMode, FormatId};

/// Wraps an instruction-plus-item block and its presented options into one
/// of the textual formats. `options` pairs presented letters with option
/// label texts in presentation order. Returns the prompt text and the
/// extraction spec naming the cue and valid answer tokens.
pub fn wrap_format(
    question_block: &str,
    options: &[(String, String)],
    fmt: FormatId,
) -> (String, AnswerExtractionSpec) {
    let letters: Vec<String> = options.iter().map(|(l, _)| l.clone()).collect();
    let spec = |cue: &str| AnswerExtractionSpec {
        mode: ExtractionMode::LetterAfterCue,
        cue: cue.to_string(),
        valid_tokens: letters.clone(),
    };
    match fmt {
        FormatId::Chat => {
            let mut text = String::from(question_block);
            text.push('\n');
            for (letter, label) in options {
                text.push_str(&format!("{letter}. {label}\n"));
            }
            text.push_str("Answer:");
            (text, spec("Answer:"))
        }
        FormatId::PyCode => {
            let mut text = format!("query = \"\"\"\n{question_block}\n\"\"\"\n\n");
            text.push_str("# Define the answers dictionary\nanswers_dict = {\n");
            for (letter, label) in options {
                text.push_str(&format!("\t\"{letter}.\": \"{label}\",\n"));
            }
            text.push_str("}\n\n# Choose the answer\nanswer = answers_dict[\"");
            (text, spec("answer = answers_dict[\""))
        }
        FormatId::CppCode => {
            let mut text = String::from(
                "#include <iostream>\n#include <string>\n#include <map>\nint main() {\n",
            );
            text.push_str(&format!(
                "\tstd::string query = R\"(\n{question_block}\n)\";\n\n"
            ));
            text.push_str(
                "\t// Define the answers dictionary\n\tstd::map<std::string, std::string> answers_dict = {\n",
            );
            for (letter, label) in options {
                text.push_str(&format!("\t\t{{\"{letter}.\", \"{label}\"}},\n"));
            }
            text.push_str("\t};\n\n\t// Choose the answer\n\tstd::string answer = answers_dict[\"");
            (text, spec("answer = answers_dict[\""))
        }
        FormatId::TomlConf => {
            let mut text = String::from("[questionnaire]\n");
            for line in question_block.lines() {
                if line.is_empty() {
                    text.push('\n');
                } else {
                    text.push_str(&format!("# {line}\n"));
                }
            }
            for (letter, label) in options {
                text.push_str(&format!("# {letter}. {label}\n"));
            }
            text.push_str("answer = ");
            (text, spec("answer = "))
        }
        FormatId::Latex => {
            let mut text = String::from(
                "\\documentclass{article}\n\\usepackage{enumitem}\n\n\\begin{document}\n\n",
            );
            text.push_str(question_block);
            text.push_str("\n\\begin{enumerate}[label=\\Alph*.]\n");
            for (_, label) in options {
                text.push_str(&format!("\t\\item {label}\n"));
            }
            text.push_str("\\end{enumerate}\nAnswer:");
            (text, spec("Answer:"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn options() -> Vec<(String, String)> {
        ["Not like me", "Not like me at all", "Like me"]
            .iter()
            .enumerate()
            .map(|(i, label)| (char::from(b'A' + i as u8).to_string(), label.to_string()))
            .collect()
    }

    #[test]
    fn chat_ends_with_answer_cue() {
        let (text, spec) = wrap_format("Block.", &options(), FormatId::Chat);
        assert!(text.ends_with("C. Like me\nAnswer:"));
        assert_eq!(spec.cue, "Answer:");
        assert_eq!(spec.valid_tokens, vec!["A", "B", "C"]);
    }

    #[test]
    fn py_ends_inside_answer_lookup() {
        let (text, spec) = wrap_format("Block.", &options(), FormatId::PyCode);
        assert!(text.ends_with("answer = answers_dict[\""));
        assert!(text.contains("\t\"A.\": \"Not like me\",\n"));
        assert_eq!(spec.cue, "answer = answers_dict[\"");
    }

    #[test]
    fn cpp_ends_inside_answer_lookup() {
        let (text, _) = wrap_format("Block.", &options(), FormatId::CppCode);
        assert!(text.starts_with("#include <iostream>\n"));
        assert!(text.ends_with("\tstd::string answer = answers_dict[\""));
        assert!(text.contains("\t\t{\"B.\", \"Not like me at all\"},\n"));
    }

    #[test]
    fn toml_prefixes_options_and_ends_with_assignment() {
        let (text, spec) = wrap_format("Line one.\n\nLine two.", &options(), FormatId::TomlConf);
        assert!(text.starts_with("[questionnaire]\n# Line one.\n\n# Line two.\n"));
        assert!(text.contains("# A. Not like me\n"));
        assert!(text.ends_with("answer = "));
        assert_eq!(spec.cue, "answer = ");
    }

    #[test]
    fn latex_enumerates_then_cues() {
        let (text, _) = wrap_format("Block.", &options(), FormatId::Latex);
        assert!(text.contains("\\begin{enumerate}[label=\\Alph*.]\n\t\\item Not like me\n"));
        assert!(text.ends_with("\\end{enumerate}\nAnswer:"));
    }
}
