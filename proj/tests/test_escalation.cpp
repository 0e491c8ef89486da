#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <thread>

#include "eldercare/escalation.hpp"
#include "eldercare/sim/rng.hpp"

using namespace eldercare;

namespace {

Contact family(std::string id, bool app) { return {std::move(id), ContactRole::Family, "+1", app}; }
Contact doctor(std::string id, bool app) { return {std::move(id), ContactRole::Doctor, "+2", app}; }
Contact volunteer(std::string id, Point at, bool available = true) {
  return {std::move(id), ContactRole::Volunteer, "+3", true, at, available};
}

Alert alert_at(AlertLevel level, std::string id = "A1") {
  Alert a;
  a.alert_id = std::move(id);
  a.elder_id = "elder-1";
  a.level = level;
  return a;
}

std::size_t count(const NotificationPlan& p, ContactRole role, Channel ch) {
  return std::count_if(p.entries.begin(), p.entries.end(),
                       [&](const auto& e) { return e.role == role && e.channel == ch; });
}

struct AllOpen : ChannelHandle {
  bool is_open(Channel) const override { return true; }
};
struct AllClosed : ChannelHandle {
  bool is_open(Channel) const override { return false; }
};

}  // namespace

TEST(Plan, YellowFamilyOnly) {
  std::vector<Contact> dir{family("f1", true), family("f2", false), doctor("d1", true)};
  auto p = plan_notifications(alert_at(AlertLevel::Yellow), dir, {});
  EXPECT_EQ(count(p, ContactRole::Family, Channel::Sms), 2u);
  EXPECT_EQ(count(p, ContactRole::Family, Channel::Push), 1u);
  EXPECT_EQ(p.entries.size(), 3u);
}

TEST(Plan, OrangeAddsDoctorsWithoutCalls) {
  std::vector<Contact> dir{family("f1", true), doctor("d1", true)};
  auto p = plan_notifications(alert_at(AlertLevel::Orange), dir, {});
  EXPECT_EQ(count(p, ContactRole::Family, Channel::Sms), 1u);
  EXPECT_EQ(count(p, ContactRole::Family, Channel::Push), 1u);
  EXPECT_EQ(count(p, ContactRole::Doctor, Channel::Sms), 1u);
  EXPECT_EQ(count(p, ContactRole::Doctor, Channel::Push), 1u);
  EXPECT_EQ(count(p, ContactRole::Doctor, Channel::Call), 0u);
}

TEST(Plan, RedCallsDoctors) {
  std::vector<Contact> dir{doctor("d1", true)};
  auto p = plan_notifications(alert_at(AlertLevel::Red), dir, {});
  EXPECT_EQ(count(p, ContactRole::Doctor, Channel::Sms), 1u);
  EXPECT_EQ(count(p, ContactRole::Doctor, Channel::Push), 1u);
  EXPECT_EQ(count(p, ContactRole::Doctor, Channel::Call), 1u);
}

TEST(Plan, NoneLevelIsRejected) {
  EXPECT_THROW(plan_notifications(alert_at(AlertLevel::None), {}, {}), std::invalid_argument);
}

TEST(Plan, EmptyDirectoryWarns) {
  auto p = plan_notifications(alert_at(AlertLevel::Red), {}, {});
  EXPECT_TRUE(p.entries.empty());
  EXPECT_FALSE(p.warnings.empty());
}

TEST(Volunteers, TwoNearestWithinRadius) {
  std::vector<Contact> v{volunteer("v3", {2000, 0}), volunteer("v2", {0, 200}),
                         volunteer("v1", {100, 0})};
  auto s = select_volunteers({0, 0}, v, 1000);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].contact_id, "v1");
  EXPECT_EQ(s[1].contact_id, "v2");
}

TEST(Volunteers, NoneInRange) {
  std::vector<Contact> v{volunteer("v1", {5000, 0})};
  EXPECT_TRUE(select_volunteers({0, 0}, v, 1000).empty());
}

TEST(Volunteers, SkipsUnavailableAndBreaksTiesById) {
  std::vector<Contact> v{volunteer("vb", {300, 0}), volunteer("va", {0, 300}),
                         volunteer("v0", {10, 0}, false)};
  auto s = select_volunteers({0, 0}, v, 1000);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].contact_id, "va");
  EXPECT_EQ(s[1].contact_id, "vb");
  std::vector<Contact> one{volunteer("only", {50, 50})};
  ASSERT_EQ(select_volunteers({0, 0}, one, 1000).size(), 1u);
  EXPECT_THROW(select_volunteers({0, 0}, one, 0), std::invalid_argument);
}

TEST(Dispatch, OneRecordPerEntry) {
  std::vector<Contact> dir{family("f1", true), doctor("d1", false),
                           volunteer("v1", {10, 0}), volunteer("v2", {20, 0})};
  const auto a = alert_at(AlertLevel::Red);
  auto plan = plan_notifications(a, dir, {});
  auto recs = dispatch(a, plan, AllOpen{}, 500);
  // family sms+push, doctor sms+call, two volunteer pushes
  ASSERT_EQ(recs.size(), 2u + 2u + 2u);
  std::set<std::string> ids;
  for (const auto& r : recs) {
    ids.insert(r.record_id);
    EXPECT_EQ(r.sent_at, 500);
    EXPECT_EQ(r.status, r.channel == Channel::Call ? DeliveryStatus::Ringing : DeliveryStatus::Pending);
  }
  EXPECT_EQ(ids.size(), recs.size());
}

TEST(Dispatch, ClosedChannelsFail) {
  std::vector<Contact> dir{family("f1", true), doctor("d1", true)};
  const auto a = alert_at(AlertLevel::Red);
  auto recs = dispatch(a, plan_notifications(a, dir, {}), AllClosed{}, 0);
  ASSERT_FALSE(recs.empty());
  for (const auto& r : recs) EXPECT_EQ(r.status, DeliveryStatus::Failed);
}

TEST(Status, Lifecycle) {
  NotificationRecord r{"A1/f1/sms", "A1", "f1", Channel::Sms, "", 0, DeliveryStatus::Pending, 0};
  r = update_status(r, {DeliveryStatus::Delivered, 1500});
  EXPECT_EQ(r.status, DeliveryStatus::Delivered);
  EXPECT_EQ(r.status_updated_at, 1500);
  r = update_status(r, {DeliveryStatus::Read, 9000});
  EXPECT_EQ(r.status, DeliveryStatus::Read);
  EXPECT_THROW(update_status(r, {DeliveryStatus::Pending, 9100}), TransitionError);

  NotificationRecord call{"A1/d1/call", "A1", "d1", Channel::Call, "", 0, DeliveryStatus::Ringing, 0};
  EXPECT_EQ(update_status(call, {DeliveryStatus::Voicemail, 3000}).status, DeliveryStatus::Voicemail);
  EXPECT_THROW(update_status(call, {DeliveryStatus::Delivered, 3000}), TransitionError);
}

TEST(StatusProperty, NeverMovesBackward) {
  // Rank of each status along its channel's lifecycle.
  auto rank = [](DeliveryStatus s) {
    switch (s) {
      case DeliveryStatus::Pending:
      case DeliveryStatus::Ringing: return 0;
      case DeliveryStatus::Delivered: return 1;
      default: return 2;
    }
  };
  sim::SimRng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const bool call = rng.bernoulli(0.5);
    NotificationRecord r{"id", "A", "x", call ? Channel::Call : Channel::Sms, "", 0,
                         call ? DeliveryStatus::Ringing : DeliveryStatus::Pending, 0};
    for (int step = 0; step < 10; ++step) {
      const auto to = static_cast<DeliveryStatus>(rng.uniform(0, 7));
      const int before = rank(r.status);
      try {
        r = update_status(r, {to, step});
        ASSERT_GT(rank(r.status), before);
      } catch (const TransitionError&) {
        ASSERT_FALSE(transition_allowed(r.channel, r.status, to));
      }
    }
  }
}

TEST(Store, AuditTrailAndUnknownId) {
  NotificationStore store;
  store.add({"A1/f1/sms", "A1", "f1", Channel::Sms, "abc", 0, DeliveryStatus::Pending, 0});
  store.apply("A1/f1/sms", {DeliveryStatus::Delivered, 1500});
  EXPECT_THROW(store.apply("A1/f1/sms", {DeliveryStatus::Pending, 1600}), TransitionError);
  EXPECT_EQ(store.find("A1/f1/sms")->status, DeliveryStatus::Delivered);
  EXPECT_THROW(store.apply("nope", {DeliveryStatus::Delivered, 1}), std::out_of_range);
  EXPECT_EQ(store.audit_log().size(), 2u);
}

TEST(Store, ConcurrentReceiptsAreSerialised) {
  NotificationStore store;
  for (int i = 0; i < 400; ++i) {
    store.add({"r" + std::to_string(i), "A", "x", Channel::Sms, "", 0, DeliveryStatus::Pending, 0});
  }
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < 400; i += 4) store.apply("r" + std::to_string(i), {DeliveryStatus::Delivered, i});
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& r : store.records()) EXPECT_EQ(r.status, DeliveryStatus::Delivered);
  EXPECT_EQ(store.audit_log().size(), 800u);
}

TEST(Manual, AlwaysRed) {
  auto a = manual_trigger("elder-1", "M1", 12'345);
  EXPECT_EQ(a.level, AlertLevel::Red);
  EXPECT_EQ(a.source, AlertSource::Manual);
  EXPECT_EQ(a.created_at, 12'345);
  EXPECT_TRUE(a.risk_detail.has_section("manual"));
}

TEST(Manual, PlanCoversEveryTier) {
  std::vector<Contact> dir{family("f1", true), doctor("d1", false), volunteer("v1", {1, 1})};
  auto p = plan_notifications(manual_trigger("e", "M1", 0), dir, {});
  EXPECT_GT(count(p, ContactRole::Family, Channel::Sms), 0u);
  EXPECT_GT(count(p, ContactRole::Doctor, Channel::Sms), 0u);
  EXPECT_GT(count(p, ContactRole::Doctor, Channel::Call), 0u);
  EXPECT_GT(count(p, ContactRole::Volunteer, Channel::Push), 0u);
}

TEST(Desk, ManualTriggersAreDistinctAndNeverSuppressed) {
  AlertDesk desk("elder-1");
  auto a = desk.manual_trigger(1000);
  auto b = desk.manual_trigger(2000);
  EXPECT_NE(a.alert_id, b.alert_id);
  EXPECT_EQ(desk.suppressed_count(), 0u);
}

TEST(Desk, SameLevelRepeatsAreSuppressed) {
  AlertDesk desk("elder-1", 60'000);
  RiskAssessment ra;
  ra.level = AlertLevel::Orange;
  EXPECT_TRUE(desk.raise(ra, "kitchen", 0));
  EXPECT_FALSE(desk.raise(ra, "kitchen", 59'999));
  EXPECT_EQ(desk.suppressed_count(), 1u);
  EXPECT_EQ(desk.suppression_log().size(), 1u);
  EXPECT_TRUE(desk.raise(ra, "kitchen", 60'000));
  ra.level = AlertLevel::Red;
  EXPECT_TRUE(desk.raise(ra, "kitchen", 60'001));
  ra.level = AlertLevel::None;
  EXPECT_FALSE(desk.raise(ra, "kitchen", 90'000));
}

// Escalation matrix over random directories.
TEST(PlanProperty, MatrixNestingAndVolunteerCap) {
  sim::SimRng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Contact> dir;
    const int n = static_cast<int>(rng.uniform(0, 12));
    for (int i = 0; i < n; ++i) {
      const auto id = "c" + std::to_string(i);
      switch (static_cast<int>(rng.uniform(0, 3))) {
        case 0: dir.push_back(family(id, rng.bernoulli(0.5))); break;
        case 1: dir.push_back(doctor(id, rng.bernoulli(0.5))); break;
        default:
          dir.push_back(volunteer(id, {rng.uniform(-1500, 1500), rng.uniform(-1500, 1500)},
                                  rng.bernoulli(0.8)));
      }
    }
    auto entries = [&](AlertLevel l) {
      auto p = plan_notifications(alert_at(l), dir, {});
      return std::set<PlanEntry>(p.entries.begin(), p.entries.end());
    };
    const auto y = entries(AlertLevel::Yellow);
    const auto o = entries(AlertLevel::Orange);
    const auto r = entries(AlertLevel::Red);
    ASSERT_TRUE(std::includes(o.begin(), o.end(), y.begin(), y.end()));
    ASSERT_TRUE(std::includes(r.begin(), r.end(), o.begin(), o.end()));
    std::set<std::string> vols;
    for (const auto& e : y) ASSERT_EQ(e.role, ContactRole::Family);
    for (const auto& e : o) ASSERT_NE(e.channel, Channel::Call);
    for (const auto& e : r) {
      if (e.role == ContactRole::Volunteer) vols.insert(e.recipient);
    }
    ASSERT_LE(vols.size(), 2u);
  }
}
