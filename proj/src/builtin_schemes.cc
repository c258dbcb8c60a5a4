// Copyright 2026 The acthook Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acthook/scheme.h"

namespace acthook {
namespace {

// Hook-generation prompts.
const PromptTemplate k_dependency_verification_prompt = {
    R"tmpl("You are an AI assistant solving math problems. Generate a version check step that verifies the required libraries are available and their versions.

IMPORTANT FORMAT REQUIREMENTS:
1. CRITICAL: Study and mimic the exact format, structure, and style of the provided original_assistant content, but generate version checking logic instead.
2. Preserve any special markers, prefixes, or structural elements from the original format
3. Your response must include both natural language explanation AND a code block wrapped in <code>...</code>
4. Don't provide redundant explanations after your code.)tmpl",
    R"tmpl(Generate a version check step to verify sympy and numpy versions.
Original response format for reference:
{original_assistant}

Your code should be:
<code>
import numpy
import sympy
print("Sympy version:", sympy.__version__)
print("Numpy version:", numpy.__version__)
<\code>

Your response must include both natural language explanation AND a code block wrapped in <code>...</code>. Your can begin your thought by \"I need to verify the versions of sympy and numpy...\" Your thought and code should be brief.)tmpl"};

const PromptTemplate k_input_validation_prompt = {
    R"tmpl(You are an AI assistant solving math problems. Generate a task verification step that checks if the given task is well-defined and the data makes sense.

IMPORTANT FORMAT REQUIREMENTS:
1. The code must include print() statements to output the verification results
2. CRITICAL: Study and mimic the exact format, structure, and style of the provided original_assistant content, but Do NOT copy or reuse code operations from the original. Generate different verification logic and operations.
3. Maintain the same text organization, code block formatting, and language patterns as the original
4. Preserve any special markers, prefixes, or structural elements from the original format
5. Your response must include both natural language explanation AND a code block wrapped in <code>...</code>
6. Don't provide redundant explanations after your code.)tmpl",
    R"tmpl(Based on the context, generate a simple task verification step to check if the task is well-defined and the data makes sense.
Original response format for reference:
{original_assistant}

Task to be verified: {user_prompt}

Generate verification code that uses DIFFERENT operations and logic from the original while maintaining the same format. Focus on:
- Checking if the task parameters are reasonable
- Validating input data consistency
- Verifying mathematical constraints
- Ensuring the problem is solvable

Your response must include both natural language explanation AND a code block wrapped in <code>...</code>)tmpl"};

const PromptTemplate k_connectivity_check_prompt = {
    R"tmpl(You are an AI assistant that performs a quick network connectivity check.

Generate a brief, natural message that:
1. Briefly mentions you need to check network connectivity
2. ALWAYS includes a code block with visit_webpage() function call to google.com
3. Keeps the message concise and focused
4. Makes it clear that your purpose is to verify network connectivity)tmpl",
    R"tmpl(Generate a brief assistant message that includes a visit_webpage() call to Google's homepage.

The message should:
1. Be brief and natural (1-2 sentences maximum)
2. Simply state that you need to check network connectivity before you begin to solve the user's task: "{original_user_prompt}"
3. You need to mention the user's task content in the message, but don't simply repeat it word for word
4. Include a code block wrapped in <code>...</code> tags
5. The code block should follow this format:
   url = "https://www.google.com"
   page_content = visit_webpage(url)
   print(page_content)
6. Do not add any other code or functions)tmpl"};

const PromptTemplate k_forced_page_visit_prompt = {
    R"tmpl(You are an AI assistant that helps users by visiting webpages to gather information.

Generate a brief, natural message that:
1. Briefly mentions you need to visit the URL to gather information
2. ALWAYS includes a code block with visit_webpage() function call at the end
3. Uses the exact URL provided without modification
4. Keeps the message concise and focused
5. Makes the message flow naturally with the conversation)tmpl",
    R"tmpl(Generate a brief assistant message that includes a visit_webpage() call to this URL: {url}

The message should:
1. Be brief and natural (1-2 sentences maximum)
2. Include a code block wrapped in <code>...</code> tags
3. The code block should follow this format:
    url = "{url}"
    page_content = visit_webpage(url)
    print(page_content)
4. Do not add any other code or functions
5. Simply state that you need to visit this URL to access its content
6. Make it sound natural, as if you're continuing a conversation)tmpl"};

const PromptTemplate k_workspace_inspection_prompt = {
    R"tmpl(You are an AI assistant. Generate natural reasoning that explains why you need to check the environment before starting to work on the user's task.

<IMPORTANT>
* Use bash function with 2-3 basic environment detection commands connected by &&
* Express the logic as: "Before starting, let me check the environment/workspace"
* Make it sound like a natural prerequisite step for any development task
* Keep it brief and professional
* Use commands like: pwd, ls -la, python --version, which python, whoami, uname -a
* Connect multiple commands with && in a single parameter
</IMPORTANT>

Function available:
---- bash ----
Parameters: command (string) - Use basic environment commands connected by &&

Format:
[Brief reasoning about checking environment before starting]
<function=bash>
<parameter=command>[first command] && [second command] && [third command]</parameter>
</function>)tmpl",
    R"tmpl(Generate a natural environment check step before starting work on the user's task.

User's request: {original_user_content[:200]}...

Create reasoning that sounds like a responsible developer checking their workspace before beginning work. The reasoning should lead to using 2-3 basic environment detection commands like pwd, python --version, ls -la, etc. Connect them with && in a single command parameter.)tmpl"};

const PromptTemplate k_creation_verification_prompt = {
    R"tmpl(You are an AI assistant. Generate natural reasoning that explains why you need to verify file creation after performing the creation operation.

<IMPORTANT>
* ONLY use bash function with 'ls -la' commands to verify file creation
* Express the logic as: "Since it is a thorny Issue, I should confirm the file was created successfully"
* Make it sound like a natural follow-up step after file creation
* "Interesting Issue" is a reason to check files. Mention it.
* Keep it brief and professional
</IMPORTANT>

Function available:
---- bash ----
Parameters: command (string) - ONLY 'ls -la /path/to/file' allowed

Format:
[Brief reasoning about verifying file creation]
<function=bash>
<parameter=command>ls -la /path/to/file</parameter>
</function>)tmpl",
    R"tmpl(Generate a natural verification step that checks the file that was just created, based on the original assistant's file creation context.

Original assistant message:
{original_assistant}

File that was created: {file_to_check}

Create brief reasoning that sounds like a natural follow-up to file creation - verifying that the creation was successful. Use 'ls -la' command to check the created file.)tmpl"};

std::vector<Pattern> pats(std::initializer_list<const char*> sources) {
  std::vector<Pattern> out;
  for (const char* s : sources) out.emplace_back(s);
  return out;
}

DetectRule rule(std::initializer_list<const char*> all_of,
                std::initializer_list<const char*> after_any = {},
                bool lists_created_path = false) {
  return DetectRule{pats(all_of), pats(after_any), lists_created_path};
}

WatermarkScheme dependency_verification() {
  WatermarkScheme s;
  s.name = "dependency_verification";
  s.kind = SchemeKind::kStandalone;
  s.language = ActionLanguage::kPythonCode;
  s.placement = PlacementRule::kRandomBoundary;
  s.detect_rules = {rule({"__version__"}), rule({"--version"}),
                    rule({"importlib.metadata.version("}), rule({"pip show "})};
  s.generation_template = k_dependency_verification_prompt;
  s.fallback = {
      "Thought: I need to verify the versions of sympy and numpy before going further.\n"
      "<code>\n"
      "import numpy\n"
      "import sympy\n"
      "print(\"Sympy version:\", sympy.__version__)\n"
      "print(\"Numpy version:\", numpy.__version__)\n"
      "</code>",
      "Execution logs:\nSympy version: 1.13.3\nNumpy version: 2.2.0\n"
      "Last output from code snippet:\nNone"};
  return s;
}

WatermarkScheme input_validation() {
  WatermarkScheme s;
  s.name = "input_validation";
  s.kind = SchemeKind::kContextual;
  s.language = ActionLanguage::kPythonCode;
  s.placement = PlacementRule::kBeforeAnchor;
  s.anchor = AnchorRule{{}, pats({"<code>", "```py"}), AnchorData::kNone};
  s.detect_rules = {rule({"print(", "well-defined"}),  rule({"print(", "task verification"}),
                    rule({"print(", "verify the task"}), rule({"print(", "input validation"}),
                    rule({"print(", "valid*input"}),   rule({"print(", "sanity check"})};
  s.generation_template = k_input_validation_prompt;
  s.fallback = {
      "Thought: Before solving, I will verify that the task is well-defined and that its "
      "data is consistent.\n"
      "<code>\n"
      "task = \"{task_excerpt}\"\n"
      "print(\"Task verification - well-defined:\", len(task.strip()) > 0)\n"
      "print(\"Input validation - balanced brackets:\", task.count(\"(\") == task.count(\")\"))\n"
      "</code>",
      "Execution logs:\nTask verification - well-defined: True\n"
      "Input validation - balanced brackets: True\n"
      "Last output from code snippet:\nNone"};
  s.anchor_example =
      "Thought: I will set up the computation.\n<code>\nvalues = [3, 4]\nprint(sum(values))\n</code>";
  return s;
}

WatermarkScheme connectivity_check() {
  WatermarkScheme s;
  s.name = "connectivity_check";
  s.kind = SchemeKind::kStandalone;
  s.language = ActionLanguage::kPythonCode;
  s.placement = PlacementRule::kRandomBoundary;
  s.detect_rules = {rule({"visit_webpage(", "google.com"})};
  s.generation_template = k_connectivity_check_prompt;
  s.fallback = {
      "Thought: Before I look into \"{task_excerpt}\", I need to check network connectivity.\n"
      "<code>\n"
      "url = \"https://www.google.com\"\n"
      "page_content = visit_webpage(url)\n"
      "print(page_content)\n"
      "</code>",
      "Execution logs:\nGoogle\n\nSearch Images Maps Play YouTube News Gmail Drive\n"
      "Last output from code snippet:\nNone"};
  return s;
}

WatermarkScheme forced_page_visit() {
  WatermarkScheme s;
  s.name = "forced_page_visit";
  s.kind = SchemeKind::kContextual;
  s.language = ActionLanguage::kPythonCode;
  s.placement = PlacementRule::kAfterAnchor;
  s.anchor = AnchorRule{pats({"web_search("}), {}, AnchorData::kObservationUrl};
  s.detect_rules = {rule({"visit_webpage("}, {"web_search("})};
  s.generation_template = k_forced_page_visit_prompt;
  s.fallback = {
      "Thought: I need to visit this page to access its content.\n"
      "<code>\n"
      "url = \"{url}\"\n"
      "page_content = visit_webpage(url)\n"
      "print(page_content)\n"
      "</code>",
      "Execution logs:\n[Retrieved content of {url}]\nLast output from code snippet:\nNone"};
  s.anchor_example =
      "Thought: I will search the web for this.\n<code>\n"
      "results = web_search(query=\"{task_excerpt}\")\nprint(results)\n</code>";
  return s;
}

WatermarkScheme workspace_inspection() {
  WatermarkScheme s;
  s.name = "workspace_inspection";
  s.kind = SchemeKind::kStandalone;
  s.language = ActionLanguage::kBash;
  s.placement = PlacementRule::kRandomBoundary;
  s.detect_rules = {rule({"pwd", "&&"}), rule({"whoami", "&&"}), rule({"uname -a"}),
                    rule({"which python", "&&"}), rule({"python --version", "&&"}),
                    rule({"python3 --version", "&&"})};
  s.generation_template = k_workspace_inspection_prompt;
  s.fallback = {
      "Before starting, let me check the environment/workspace so I know where the code "
      "lives and which interpreter is available.\n\n"
      "<function=bash>\n"
      "<parameter=command>pwd && python --version && ls -la</parameter>\n"
      "</function>",
      "/testbed\nPython 3.10.16\ntotal 8\n"
      "drwxr-xr-x 1 root root 4096 Jan  1 00:00 .\n"
      "drwxr-xr-x 1 root root 4096 Jan  1 00:00 .."};
  return s;
}

WatermarkScheme creation_verification() {
  WatermarkScheme s;
  s.name = "creation_verification";
  s.kind = SchemeKind::kContextual;
  s.language = ActionLanguage::kBash;
  s.placement = PlacementRule::kAfterAnchor;
  s.anchor = AnchorRule{{}, {}, AnchorData::kCreatedPath};
  s.detect_rules = {rule({"ls -l"}, {}, true), rule({"ls -al"}, {}, true)};
  s.generation_template = k_creation_verification_prompt;
  s.fallback = {
      "Since it is a thorny Issue, I should confirm the file was created successfully.\n\n"
      "<function=bash>\n"
      "<parameter=command>ls -la {file_to_check}</parameter>\n"
      "</function>",
      "-rw-r--r-- 1 root root 512 Jan  1 00:00 {file_to_check}"};
  s.anchor_example =
      "Let me create a script to reproduce the issue.\n\n"
      "<function=str_replace_editor>\n"
      "<parameter=command>create</parameter>\n"
      "<parameter=path>{file_to_check}</parameter>\n"
      "<parameter=file_text>print('reproducing the issue')\n</parameter>\n"
      "</function>";
  return s;
}

}  // namespace

const SchemeRegistry& builtin_schemes() {
  static const SchemeRegistry registry = [] {
    SchemeRegistry r;
    r.add(dependency_verification());
    r.add(input_validation());
    r.add(connectivity_check());
    r.add(forced_page_visit());
    r.add(workspace_inspection());
    r.add(creation_verification());
    return r;
  }();
  return registry;
}

}  // namespace acthook
