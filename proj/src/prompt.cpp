#include "phishbench/prompt.hpp"

#include "phishbench/errors.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace phishbench {

namespace {

constexpr const char* kUrlPlaceholder = "{original_url}";
constexpr const char* kHtmlPlaceholder = "{html_text}";
constexpr const char* kCharCountPlaceholder = "{original_character_count}";

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

const char kDefaultTemplate[] =
R"tmpl(You are a cybersecurity expert analysing websites for phishing attempts. Your task is to examine the provided HTML code and the original website URL to determine if the website is likely a phishing site.

**Important:** The HTML may be truncated to reduce costs, so CSS styles and JavaScript code may be missing. Focus on the HTML structure, text content, URLs, and the original URL.
Original URL: '{original_url}'
HTML: '{html_text}'
Original HTML character count: '{original_character_count}'

When assessing the likelihood of phishing, consider both your general knowledge of phishing techniques and the evidence you see in the data - focus on HTML structure, content, and domain/URL consistency."
Below are common examples of phishing indicators you may find useful, but you are not limited to them:

1. **Suspicious URLs/domains** - Check href attributes, form actions, image sources for:
    - Misspelled brand names, unusual domains, suspicious subdomains
    - IP addresses instead of domains, excessive hyphens, unusual TLDs

2. **Form analysis** - Login/input forms with:
    - Action URLs pointing to wrong domains
    - Password/sensitive data collection for mismatched brands
    - Excessive personal information requests (SSN, full address, etc.)

3. **Content and language** - Text containing:
    - Urgent threats: 'Account suspended', 'Verify immediately', 'Limited time'
    - Fear tactics: 'Security breach', 'Unauthorised access detected'
    - Reward baits: 'You have won', 'Free gift', 'Exclusive offer'

4. **HTML structure issues**:
    - Spelling/grammar errors in text content
    - Inconsistent or poor HTML structure
    - Missing or suspicious meta tags (title, description)

5. **Link analysis** - Check all href attributes for:
    - Links to different domains than expected
    - Shortened URLs (bit.ly, tinyurl, etc.)
    - Misleading anchor text vs actual URL

6. **Brand impersonation** - Look for:
    - Company names in text that don't match domain
    - References to legitimate services (PayPal, Amazon, banks, ...) on wrong domains
    - Official-sounding but incorrect terminology

7. **Missing legitimacy markers**:
    - No contact information or privacy policy links
    - Missing proper company details in footer
    - No legitimate copyright notices

**Note:** Since CSS/JS may be truncated, focus on HTML tags, text content, and URL analysis rather than visual styling or dynamic behaviour.
**Scoring guide:**
- 0-2: Very unlikely phishing (legitimate site)
- 3-4: Low risk (minor suspicious elements)
- 5-6: Medium risk (several concerning indicators)
- 7-8: High risk (multiple clear phishing signs)
- 9-10: Very high risk (obvious phishing attempt)

**Required output format (JSON only):**
{
    phishing_score: int [0-10],
    is_phishing: boolean [true/false],
    reasoning: string [Brief explanation of your decision based on specific indicators found]
}

**Output Constraints:**
Do only output the JSON-formatted output and nothing else.
)tmpl";

} // namespace

PromptTemplate PromptTemplate::from_string(std::string body) {
    for (const char* placeholder :
         {kUrlPlaceholder, kHtmlPlaceholder, kCharCountPlaceholder}) {
        std::size_t n = count_occurrences(body, placeholder);
        if (n != 1) {
            throw ConfigError("prompt template must contain placeholder " +
                              std::string(placeholder) + " exactly once (found " +
                              std::to_string(n) + ")");
        }
    }
    return PromptTemplate(std::move(body));
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open prompt template: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

PromptTemplate PromptTemplate::paper_default() {
    return from_string(kDefaultTemplate);
}

RenderedPrompt render(const PromptTemplate& tmpl, const WebsiteRecord& record,
                      const DistilledHtml& distilled, TokenEstimator estimator) {
    // Single pass over the template body; substituted content is never
    // rescanned, so HTML containing placeholder-like text cannot recurse.
    const std::array<std::pair<std::string, const std::string*>, 3> slots = {{
        {kUrlPlaceholder, &record.url},
        {kHtmlPlaceholder, &distilled.html},
        {kCharCountPlaceholder, nullptr},
    }};
    const std::string char_count = std::to_string(record.prompt_char_count());

    const std::string& body = tmpl.body();
    std::string text;
    text.reserve(body.size() + distilled.html.size() + record.url.size());
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t next = body.find('{', pos);
        if (next == std::string::npos) {
            text.append(body, pos, body.size() - pos);
            break;
        }
        text.append(body, pos, next - pos);
        bool matched = false;
        for (const auto& [placeholder, value] : slots) {
            if (body.compare(next, placeholder.size(), placeholder) == 0) {
                text += value ? *value : char_count;
                pos = next + placeholder.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            text += '{';
            pos = next + 1;
        }
    }

    RenderedPrompt rendered;
    rendered.text = std::move(text);
    rendered.token_estimate = count_tokens(rendered.text, estimator);
    rendered.website_id = record.id;
    return rendered;
}

} // namespace phishbench
