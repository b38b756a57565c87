#include "riskrel/synthetic.hpp"

#include "riskrel/error.hpp"
#include "riskrel/io.hpp"
#include "riskrel/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <string_view>

namespace riskrel::synthetic {
namespace {

struct Theme {
  std::string_view ticker;
  std::string_view sector;
  std::string_view industry;
  std::vector<std::string_view> nouns;
  std::vector<std::string_view> events;
};

const std::vector<Theme>& themes() {
  static const std::vector<Theme> kThemes = {
      {"SOLR", "Information Technology", "Semiconductor Equipment",
       {"microinverter shipments", "residential solar installers", "battery storage systems",
        "net metering policies", "solar tax credits", "photovoltaic module prices",
        "installer channel inventory", "storage attach rates", "utility interconnection rules",
        "rooftop solar demand", "inverter warranty reserves", "distributed generation incentives",
        "solar financing partners", "grid export tariffs", "home energy management software"},
       {"a fire at our primary inverter assembly facility", "the expiration of a state net metering program",
        "a recall of battery storage units", "the loss of a major installer customer",
        "a customs hold on imported solar cells"}},
      {"SOCL", "Communication Services", "Interactive Media",
       {"advertising revenue", "user engagement metrics", "mobile ad targeting",
        "content moderation obligations", "privacy rules on user data", "daily active users",
        "advertiser budgets", "recommendation algorithms", "creator monetization programs",
        "app store policies", "measurement signal loss", "virtual reality headsets",
        "ad impression pricing", "platform integrity investments", "messaging product adoption"},
       {"a service outage affecting our advertising platform", "a data privacy enforcement order",
        "a change in mobile tracking permissions", "a security incident exposing user records",
        "an antitrust complaint against our ad business"}},
      {"BNKA", "Financials", "Banks",
       {"net interest margin", "commercial real estate loans", "deposit outflows",
        "allowance for credit losses", "loan portfolio concentrations", "capital adequacy ratios",
        "wholesale funding costs", "borrower defaults", "uninsured deposits",
        "mortgage origination volumes", "regulatory capital requirements", "liquidity coverage",
        "charge-off rates", "unrealized securities losses", "small business lending"},
       {"the failure of a regional peer bank", "a downgrade of our credit rating",
        "large deposit withdrawals by commercial clients", "a consent order issued by our regulators",
        "a failed stress test submission"}},
      {"INSU", "Financials", "Insurance",
       {"catastrophe losses", "hurricane exposure", "reinsurance costs", "loss reserve development",
        "policyholder claims", "underwriting margins", "wildfire losses", "premium rate adequacy",
        "investment portfolio yields", "statutory surplus", "catastrophe modeling assumptions",
        "claims severity trends", "property casualty pricing", "ceded reinsurance recoverables",
        "social inflation in jury awards"},
       {"a major hurricane making landfall in Florida", "a wildfire outbreak in California",
        "a reserve strengthening charge", "the termination of a reinsurance treaty",
        "a severe hailstorm across Texas"}},
      {"PHRX", "Health Care", "Pharmaceuticals",
       {"clinical trial results", "regulatory approval timelines", "drug pricing reforms",
        "patent exclusivity periods", "generic competition", "manufacturing inspections",
        "product liability claims", "biosimilar entrants", "pipeline candidates", "adverse event reports",
        "government price negotiation", "contract research organizations",
        "active pharmaceutical ingredients", "label expansion studies", "orphan drug designations"},
       {"a complete response letter for our lead candidate", "a manufacturing warning letter",
        "the patent expiration of our top product", "a clinical hold on a pivotal study",
        "a contamination finding at our sterile plant"}},
      {"HLTH", "Health Care", "Health Care Providers",
       {"Medicare reimbursement rates", "Medicaid enrollment levels", "hospital admissions",
        "nurse staffing shortages", "payer mix shifts", "patient volumes", "value-based care contracts",
        "physician recruitment", "uncompensated care costs", "managed care negotiations",
        "outpatient surgery centers", "clinical labor wages", "patient safety standards",
        "health system consolidation", "emergency department visits"},
       {"a ransomware attack on our hospital systems", "a strike by nursing staff",
        "a reimbursement rate cut announcement", "the closure of a rural hospital",
        "a billing system conversion failure"}},
      {"PETR", "Energy", "Oil, Gas and Consumable Fuels",
       {"crude oil prices", "natural gas realizations", "drilling rig availability",
        "reserve replacement", "refining margins", "pipeline takeaway capacity",
        "OPEC production decisions", "well completion costs", "hydraulic fracturing rules",
        "methane emission standards", "upstream capital budgets", "offshore lease sales",
        "commodity hedging contracts", "decommissioning obligations", "shale acreage productivity"},
       {"an explosion at our refinery", "an OPEC production cut", "a pipeline rupture",
        "a hurricane shutdown of offshore platforms", "a wellhead blowout in the Permian basin"}},
      {"AIRW", "Industrials", "Passenger Airlines",
       {"jet fuel costs", "passenger demand", "aircraft delivery delays", "pilot union contracts",
        "air traffic control staffing", "loyalty program revenue", "airport slot constraints",
        "fleet maintenance events", "corporate travel bookings", "seat capacity growth",
        "flight cancellations", "engine inspection programs", "international route authorities",
        "ancillary fee revenue", "crew scheduling systems"},
       {"a nationwide system outage grounding flights", "a pilot strike authorization vote",
        "an engine defect inspection directive", "a winter storm disrupting our hub operations",
        "a runway incursion investigation"}},
  };
  return kThemes;
}

const std::vector<std::string_view> kSupplyChain = {
    "semiconductor component shortages", "contract manufacturers in Asia", "ocean freight rates",
    "port congestion", "single-source suppliers", "logistics disruptions", "raw material lead times",
    "expedited shipping costs", "supplier capacity constraints", "tariffs on imported components",
    "inventory buffer levels", "chip allocation from foundries", "supply agreements with vendors",
    "factory shutdowns abroad", "shipping container availability"};

const std::vector<std::string_view> kMacro = {
    "inflationary pressures", "rising interest rates", "economic recession", "consumer spending",
    "foreign exchange volatility", "geopolitical conflicts", "labor market conditions",
    "credit market tightening", "government shutdowns", "pandemic outbreaks", "tax law changes",
    "capital market volatility", "unemployment levels", "trade policy uncertainty",
    "global economic growth"};

// Sentence frames shared by every filer; {} slots take theme phrases.
const std::vector<std::string_view> kFrames = {
    "our {} could be adversely affected by {} and {}.",
    "we depend on {}, and any deterioration in {} could harm our results of operations.",
    "changes in {} may increase our exposure to {} and reduce {}.",
    "if we are unable to manage {} effectively, our {} and {} could suffer.",
    "we cannot assure you that {} will not materially affect {}.",
    "significant uncertainty regarding {} could require us to revise our expectations for {}.",
    "in addition, {} and {} may fluctuate significantly from period to period.",
    "any of these factors, including {}, could have a material adverse effect on our financial condition.",
    "we continue to monitor {} closely, but {} remains difficult to predict.",
    "competitors that respond more quickly to {} may gain an advantage in {}.",
    "our ability to mitigate {} depends in part on {} and {}.",
    "historically, {} has been correlated with {}, and this relationship may change.",
};

const std::vector<std::string_view> kMarketFrames = {
    "we are exposed to market risk from {} and {}.",
    "a hypothetical ten percent change in {} would not materially change our exposure to {}.",
    "we manage exposure to {} through {} and do not enter into derivatives for speculative purposes.",
    "our sensitivity to {} is measured using assumptions about {} and {}.",
    "fluctuations in {} could affect the fair value of instruments tied to {}.",
};

constexpr std::array<std::string_view, 12> kMonths = {"January", "February", "March",     "April",
                                                      "May",     "June",     "July",      "August",
                                                      "September", "October", "November", "December"};

struct Date {
  int year;
  int month;
  int day;
};

std::string format_date(const Date& d, int style) {
  char buf[32];
  switch (style % 4) {
    case 1:
      std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", d.month, d.day, d.year);
      return buf;
    case 2:
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
      return buf;
    case 3:
      if (d.month >= 8 && d.month != 9) {
        return std::string(kMonths[static_cast<std::size_t>(d.month - 1)].substr(0, 3)) + ". " +
               std::to_string(d.day) + ", " + std::to_string(d.year);
      }
      [[fallthrough]];
    default:
      return std::string(kMonths[static_cast<std::size_t>(d.month - 1)]) + " " + std::to_string(d.day) +
             ", " + std::to_string(d.year);
  }
}

class Writer {
 public:
  explicit Writer(std::uint64_t seed) : rng_(seed) {}

  Rng& rng() { return rng_; }

  std::string_view pick(const std::vector<std::string_view>& items) {
    return items[static_cast<std::size_t>(rng_.uniform_int(0, items.size() - 1))];
  }

  /// Fills a frame with distinct phrases, each drawn from `primary` except
  /// with probability `mix` from `secondary`.
  std::string sentence(const std::vector<std::string_view>& frames, const std::vector<std::string_view>& primary,
                       const std::vector<std::string_view>& secondary, double mix) {
    const std::string_view frame = pick(frames);
    std::string out;
    std::vector<std::string_view> used;
    std::size_t pos = 0;
    while (true) {
      const std::size_t slot = frame.find("{}", pos);
      out.append(frame.substr(pos, slot == std::string_view::npos ? std::string_view::npos : slot - pos));
      if (slot == std::string_view::npos) break;
      std::string_view phrase;
      do {
        phrase = rng_.uniform() < mix ? pick(secondary) : pick(primary);
      } while (std::find(used.begin(), used.end(), phrase) != used.end());
      used.push_back(phrase);
      out.append(phrase);
      pos = slot + 2;
    }
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
  }

  /// Appends frame sentences until the paragraph holds at least `min_tokens`.
  std::vector<std::string> fill(std::vector<std::string> sentences, const std::vector<std::string_view>& frames,
                                const std::vector<std::string_view>& primary,
                                const std::vector<std::string_view>& secondary, double mix,
                                std::size_t min_tokens) {
    while (count_tokens(sentences) < min_tokens) {
      sentences.push_back(sentence(frames, primary, secondary, mix));
    }
    return sentences;
  }

  static std::size_t count_tokens(const std::vector<std::string>& sentences) {
    std::size_t n = 0;
    for (const auto& s : sentences) n += tokenize(s).size();
    return n;
  }

 private:
  Rng rng_;
};

std::string join(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

struct Block {
  std::string html;  // already wrapped
  bool counted = false;
  bool planted = false;
};

// Spread over 2023, never on a quarter end.
Date event_date(std::size_t firm, std::size_t event) {
  using namespace std::chrono;
  sys_days d = sys_days{2023y / January / 3} + days{static_cast<int>((13 * event + 3 * firm) % 355)};
  year_month_day ymd{d};
  if (unsigned(ymd.month()) % 3 == 0 && ymd == year_month_day{ymd.year() / ymd.month() / last}) {
    d -= days{1};
    ymd = year_month_day{d};
  }
  return {int(ymd.year()), static_cast<int>(unsigned(ymd.month())), static_cast<int>(unsigned(ymd.day()))};
}

constexpr std::size_t kEventsPerFirm = 25;
constexpr std::size_t kFocusSize = 4;

/// A paragraph concentrates on a few phrases of its theme, as a real risk
/// factor discusses one risk.
std::vector<std::string_view> focus(const std::vector<std::string_view>& pool, Rng& rng,
                                    std::string_view must = {}) {
  std::vector<std::string_view> shuffled = pool;
  rng.shuffle(shuffled);
  std::vector<std::string_view> out;
  if (!must.empty()) out.push_back(must);
  for (auto p : shuffled) {
    if (out.size() == kFocusSize) break;
    if (p != must) out.push_back(p);
  }
  return out;
}

struct EventSpec {
  Date date;
  std::string phrase;
  std::vector<std::string_view> focus;
};

constexpr Date kSharedDate{2023, 3, 14};
constexpr std::string_view kSharedEvent = "the closure of a major Asian container port";

// Light inline markup so the stripper has something to do.
std::string decorate(std::string text, Rng& rng) {
  const double u = rng.uniform();
  const std::size_t space = text.find(' ', text.size() / 2);
  if (space == std::string::npos) return text;
  if (u < 0.25) {
    const std::size_t next = text.find(' ', space + 1);
    if (next != std::string::npos) {
      text = text.substr(0, space + 1) + "<i>" + text.substr(space + 1, next - space - 1) + "</i>" +
             text.substr(next);
    }
  } else if (u < 0.4) {
    text = "<span style=\"font-family:Times New Roman\">" + text.substr(0, space) + "</span>" +
           text.substr(space);
  }
  return text;
}

std::string paragraph_html(const std::string& text, Rng& rng) {
  return "<p style=\"margin-top:6pt;text-align:justify\">" + decorate(text, rng) + "</p>\n";
}

std::string heading_html(std::string_view label, std::string_view title) {
  return "<p style=\"font-weight:bold\">Item&nbsp;" + std::string(label) + ".&#160;" + std::string(title) +
         "</p>\n";
}

std::string filing_html(const std::string& ticker, int year, const std::vector<Block>& risk,
                        const std::vector<Block>& market, const std::string& business, const std::string& mdna,
                        Rng& rng) {
  std::string h;
  h += "<html>\n<head><title>" + ticker + " FORM 10-K " + std::to_string(year) + "</title>\n";
  h += "<style>p { font-size: 10pt; }</style></head>\n<body>\n";
  h += "<div style=\"text-align:center\"><p>UNITED STATES SECURITIES AND EXCHANGE COMMISSION</p>\n";
  h += "<p>FORM 10-K</p><p>ANNUAL REPORT FOR THE FISCAL YEAR ENDED DECEMBER 31, " + std::to_string(year) +
       "</p></div>\n";
  h += "<!-- cover page ends -->\n<p>TABLE OF CONTENTS</p>\n";
  const std::vector<std::pair<std::string_view, std::string_view>> toc = {
      {"1", "Business"},
      {"1A", "Risk Factors"},
      {"1B", "Unresolved Staff Comments"},
      {"7", "Management&#8217;s Discussion and Analysis of Financial Condition and Results of Operations"},
      {"7A", "Quantitative and Qualitative Disclosures About Market Risk"},
      {"8", "Financial Statements and Supplementary Data"}};
  int page = 3;
  for (const auto& [label, title] : toc) {
    h += "<p>Item " + std::string(label) + ". " + std::string(title) + " " + std::to_string(page) + "</p>\n";
    page += 7;
  }
  h += "<hr/>\n<p style=\"font-weight:bold\">PART I</p>\n";
  h += heading_html("1", "Business");
  h += paragraph_html(business, rng);
  h += heading_html("1A", "Risk Factors");
  h += "<p><b>Summary of Risk Factors &amp; Uncertainties</b></p>\n";
  std::size_t n = 0;
  for (const auto& b : risk) {
    h += b.html;
    if (++n == risk.size() / 2) {
      h += "<p style=\"text-align:center\">" + std::to_string(page) + "</p>\n<hr/>\n";
      h += "<table><tr><td>Risk category</td><td>Trend</td></tr><tr><td>Operations</td><td>Elevated</td></tr>"
           "</table>\n";
      h += "<p><b>Risks Related to Our Operations</b></p>\n";
    }
  }
  h += heading_html("1B", "Unresolved Staff Comments");
  h += "<p>None.</p>\n";
  h += "<p style=\"font-weight:bold\">PART II</p>\n";
  h += heading_html("7", "Management&#8217;s Discussion and Analysis of Financial Condition and Results of "
                         "Operations");
  h += paragraph_html(mdna, rng);
  h += "<table>\n<tr><td>(in millions)</td><td>" + std::to_string(year) + "</td><td>" +
       std::to_string(year - 1) + "</td></tr>\n<tr><td>Revenue</td><td>1,204</td><td>1,118</td></tr>\n"
       "<tr><td>Operating income</td><td>212</td><td>187</td></tr>\n</table>\n";
  h += heading_html("7A", "Quantitative and Qualitative Disclosures About Market Risk");
  for (const auto& b : market) h += b.html;
  h += heading_html("8", "Financial Statements and Supplementary Data");
  h += "<p>The financial statements required by this item are included on the pages that follow.</p>\n";
  h += "<table><tr><td>Consolidated Balance Sheets</td><td>F-2</td></tr></table>\n";
  h += "</body>\n</html>\n";
  return h;
}

std::string price_csv(const std::vector<std::string>& dates, const std::vector<double>& closes) {
  std::string out = "date,close\n";
  for (std::size_t t = 0; t < dates.size(); ++t) out += dates[t] + "," + io::fixed(closes[t], 4) + "\n";
  return out;
}

std::vector<std::string> trading_days(int year) {
  using namespace std::chrono;
  std::vector<std::string> out;
  for (sys_days d = sys_days{std::chrono::year{year} / January / 2};
       d <= sys_days{std::chrono::year{year} / December / 31}; d += days{1}) {
    const weekday wd{d};
    if (wd == Saturday || wd == Sunday) continue;
    const year_month_day ymd{d};
    if (unsigned(ymd.month()) == 7 && unsigned(ymd.day()) == 4) continue;
    if (unsigned(ymd.month()) == 12 && unsigned(ymd.day()) == 25) continue;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
    out.emplace_back(buf);
  }
  return out;
}

}  // namespace

Fixture generate_fixture(const FixtureOptions& options) {
  const auto& all = themes();
  Writer w(options.seed);
  Fixture fx;
  fx.planted_a = std::string(all[0].ticker);
  fx.planted_b = std::string(all[1].ticker);

  // Planted supply-chain paragraphs: one shared base per (year, k), each firm
  // receiving a copy with one sentence rewritten.
  constexpr std::size_t kPlanted = 3;
  std::map<std::pair<int, std::size_t>, std::vector<std::string>> planted_base;
  std::map<std::pair<int, std::size_t>, std::vector<std::string_view>> planted_focus;
  for (int year : options.years) {
    for (std::size_t k = 0; k < kPlanted; ++k) {
      const auto nouns = focus(kSupplyChain, w.rng());
      std::vector<std::string> s;
      if (k == 0) {
        s.push_back("Following " + std::string(kSharedEvent) + " on " + format_date(kSharedDate, 0) +
                    ", we experienced delays in " + std::string(nouns[0]) + ".");
      }
      planted_base[{year, k}] = w.fill(std::move(s), kFrames, nouns, kMacro, 0.0, 95);
      planted_focus[{year, k}] = nouns;
    }
  }

  std::string gics = "ticker,sector,industry\n";
  for (std::size_t f = 0; f < all.size(); ++f) {
    const Theme& th = all[f];
    const std::string ticker(th.ticker);
    fx.tickers.push_back(ticker);
    gics += ticker + ",\"" + std::string(th.sector) + "\",\"" + std::string(th.industry) + "\"\n";

    // Each event is reported once in every filing year, always about the
    // same handful of risks.
    std::vector<EventSpec> events;
    for (std::size_t e = 0; e < kEventsPerFirm; ++e) {
      const std::size_t incident = e % th.events.size();
      const std::string_view noun = th.nouns[(3 * (e / th.events.size()) + incident) % th.nouns.size()];
      events.push_back({event_date(f, e), std::string(th.events[incident]) + " involving our " + std::string(noun),
                        focus(th.nouns, w.rng(), noun)});
    }

    for (std::size_t yi = 0; yi < options.years.size(); ++yi) {
      const int year = options.years[yi];
      const std::string fy_end = "December 31, " + std::to_string(year);
      std::vector<std::string> risk_texts;
      std::vector<bool> risk_planted;

      auto accounting = [&](std::vector<std::string>& s, const std::vector<std::string_view>& nouns) {
        if (w.rng().uniform() < 0.5) {
          s.push_back("As of " + fy_end + ", " + std::string(w.pick(nouns)) +
                      " represented a meaningful portion of our exposure to " + std::string(w.pick(nouns)) + ".");
        }
      };

      for (std::size_t e = 0; e < events.size(); ++e) {
        const EventSpec& ev = events[e];
        const int style = static_cast<int>(e + yi);
        std::vector<std::string> s;
        if (yi == 0) {
          s.push_back("On " + format_date(ev.date, style) + ", we experienced " + ev.phrase + ".");
        } else {
          s.push_back("As previously disclosed, " + ev.phrase + " on " + format_date(ev.date, style) +
                      " continued to affect our operations.");
        }
        s.push_back("As a result, " + std::string(ev.focus[1]) + " and " + std::string(ev.focus[2]) +
                    " were adversely affected.");
        accounting(s, ev.focus);
        risk_texts.push_back(join(w.fill(std::move(s), kFrames, ev.focus, kMacro, 0.05, 85)));
        risk_planted.push_back(false);
      }
      for (int k = 0; k < 3; ++k) {
        const auto nouns = focus(th.nouns, w.rng());
        std::vector<std::string> s;
        accounting(s, nouns);
        risk_texts.push_back(join(w.fill(std::move(s), kFrames, nouns, kMacro, 0.05, 85)));
        risk_planted.push_back(false);
      }
      for (int k = 0; k < 2; ++k) {
        const auto nouns = focus(kMacro, w.rng());
        std::vector<std::string> s;
        if (w.rng().uniform() < 0.5) {
          s.push_back("For the year ended " + fy_end + ", " + std::string(nouns[0]) +
                      " weighed on demand across our markets.");
        }
        risk_texts.push_back(join(w.fill(std::move(s), kFrames, nouns, th.nouns, 0.1, 85)));
        risk_planted.push_back(false);
      }
      if (f < 2) {
        for (std::size_t k = 0; k < kPlanted; ++k) {
          std::vector<std::string> s = planted_base.at({year, k});
          const std::size_t swap = 1 + static_cast<std::size_t>(w.rng().uniform_int(0, s.size() - 2));
          s[swap] = w.sentence(kFrames, planted_focus.at({year, k}), kMacro, 0.0);
          risk_texts.push_back(join(s));
          risk_planted.push_back(true);
        }
      }

      std::vector<std::size_t> order(risk_texts.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      w.rng().shuffle(order);
      std::vector<Block> risk;
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t i = order[pos];
        risk.push_back({paragraph_html(risk_texts[i], w.rng()), true, risk_planted[i]});
        if (risk_planted[i]) {
          const std::string id = paragraph_id(ticker, year, "1A", static_cast<int>(pos));
          (f == 0 ? fx.planted_ids_a : fx.planted_ids_b).push_back(id);
        }
      }

      std::vector<Block> market;
      for (int k = 0; k < 2; ++k) {
        const auto nouns = focus(th.nouns, w.rng());
        std::vector<std::string> s;
        s.push_back("As of " + fy_end + ", our principal market exposures related to " + std::string(nouns[0]) +
                    ".");
        market.push_back({paragraph_html(join(w.fill(std::move(s), kMarketFrames, nouns, kMacro, 0.3, 80)),
                                         w.rng()),
                          true, false});
      }

      const std::string business = "We are a " + std::string(th.industry) +
                                   " company. Our business depends on " + std::string(w.pick(th.nouns)) + ".";
      const std::string mdna = "Revenue for fiscal " + std::to_string(year) + " reflected " +
                               std::string(w.pick(th.nouns)) + " and " + std::string(w.pick(kMacro)) + ".";
      fx.files["filings/" + ticker + "/" + std::to_string(year) + ".txt"] =
          filing_html(ticker, year, risk, market, business, mdna, w.rng());
    }
  }
  fx.files["gics.csv"] = gics;

  // Daily closes from a factor model: a market factor, a heavy-tailed
  // supply-chain shock carried by the planted pair, and sector factors.
  const std::vector<std::string> days = trading_days(options.years.back());
  Rng prng(options.seed ^ 0x5DEECE66DULL);
  const std::size_t nf = all.size();
  std::vector<std::vector<double>> closes(nf, std::vector<double>(days.size()));
  std::vector<double> price(nf);
  for (std::size_t f = 0; f < nf; ++f) price[f] = 40.0 + 10.0 * static_cast<double>(f);
  for (std::size_t t = 0; t < days.size(); ++t) {
    const double market = prng.normal();
    const double supply = prng.uniform() < 0.12 ? 5.0 * prng.normal() : 0.3 * prng.normal();
    const double financial = prng.normal();
    const double health = prng.normal();
    const double oil = prng.normal();
    const std::array<double, 8> sector = {1.6 * supply, 1.6 * supply, financial, financial,
                                          health,       health,       oil,       -0.8 * oil};
    for (std::size_t f = 0; f < nf; ++f) {
      const double r = 0.008 * (0.5 * market + (f < sector.size() ? sector[f] : 0.0) + 0.7 * prng.normal());
      if (t > 0) price[f] *= 1.0 + r;
      closes[f][t] = price[f];
    }
  }
  for (std::size_t f = 0; f < nf; ++f) {
    fx.files["prices/" + fx.tickers[f] + ".csv"] = price_csv(days, closes[f]);
  }

  nlohmann::ordered_json manifest;
  manifest["firm_a"] = fx.planted_a;
  manifest["firm_b"] = fx.planted_b;
  manifest["paragraphs_a"] = fx.planted_ids_a;
  manifest["paragraphs_b"] = fx.planted_ids_b;
  fx.files["planted.json"] = manifest.dump(2) + "\n";

  fx.files["train.conf"] =
      "# desk-scale training settings (the library defaults, spelled out)\n"
      "batch_size = 16\n"
      "learning_rate = 0.001\n"
      "warmup_steps = 50\n"
      "max_epochs = 50\n"
      "patience = 5\n"
      "temperature = 0.05\n"
      "l2_coeff = 0.0001\n"
      "embed_dim = 64\n"
      "max_len = 256\n"
      "min_freq = 2\n";
  return fx;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
  for (const auto& [rel, content] : fixture.files) io::write_file(dir / rel, content);
}

std::vector<Paragraph> topic_paragraphs(std::size_t topics, std::size_t per_topic, std::uint64_t seed) {
  std::vector<std::vector<std::string_view>> vocab;
  for (const auto& th : themes()) vocab.push_back(th.nouns);
  vocab.push_back(kSupplyChain);
  vocab.push_back(kMacro);
  if (topics == 0 || topics > vocab.size()) {
    throw Error(ErrorCode::InvalidArgument, "topic count must lie in [1, " + std::to_string(vocab.size()) + "]");
  }
  Writer w(seed);
  std::vector<Paragraph> out;
  for (std::size_t t = 0; t < topics; ++t) {
    const std::string firm = "T" + std::to_string(t);
    for (std::size_t k = 0; k < per_topic; ++k) {
      Paragraph p;
      p.firm_id = firm;
      p.year = 2024;
      p.section = "1A";
      p.ordinal = static_cast<int>(k);
      p.id = paragraph_id(firm, p.year, p.section, p.ordinal);
      p.text = join(w.fill({}, kFrames, vocab[t], kMacro, 0.1, 70));
      p.tokens = tokenize(p.text);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace riskrel::synthetic
