#include "eldercare/escalation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "eldercare/digest.hpp"

namespace eldercare {

std::string_view to_string(ContactRole r) {
  switch (r) {
    case ContactRole::Family: return "family";
    case ContactRole::Doctor: return "doctor";
    case ContactRole::Volunteer: return "volunteer";
  }
  return "?";
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::Sms: return "sms";
    case Channel::Push: return "push";
    case Channel::Call: return "call";
  }
  return "?";
}

std::string_view to_string(AlertSource s) {
  return s == AlertSource::Manual ? "manual" : "automatic";
}

std::string_view to_string(DeliveryStatus s) {
  switch (s) {
    case DeliveryStatus::Pending: return "pending";
    case DeliveryStatus::Delivered: return "delivered";
    case DeliveryStatus::Read: return "read";
    case DeliveryStatus::Failed: return "failed";
    case DeliveryStatus::Ringing: return "ringing";
    case DeliveryStatus::Answered: return "answered";
    case DeliveryStatus::Voicemail: return "voicemail";
  }
  return "?";
}

std::optional<ContactRole> parse_role(std::string_view s) {
  for (auto r : {ContactRole::Family, ContactRole::Doctor, ContactRole::Volunteer}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<Contact> select_volunteers(const Point& elder_location,
                                       std::span<const Contact> volunteers, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("volunteer radius must be positive");
  std::vector<std::pair<double, const Contact*>> candidates;
  for (const auto& c : volunteers) {
    if (c.role != ContactRole::Volunteer || !c.available || !c.location) continue;
    const double d = distance(elder_location, *c.location);
    if (d <= radius) candidates.emplace_back(d, &c);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->contact_id < b.second->contact_id;
  });
  std::vector<Contact> out;
  for (std::size_t i = 0; i < candidates.size() && i < kMaxVolunteers; ++i) {
    out.push_back(*candidates[i].second);
  }
  return out;
}

NotificationPlan plan_notifications(const Alert& alert, std::span<const Contact> directory,
                                    const Point& elder_location, double volunteer_radius) {
  if (alert.level == AlertLevel::None) {
    throw std::invalid_argument("NONE level alerts are never notified");
  }
  NotificationPlan plan;
  if (directory.empty()) {
    plan.warnings.push_back("empty contact directory for alert " + alert.alert_id);
    return plan;
  }
  const bool doctors = alert.level >= AlertLevel::Orange;
  const bool red = alert.level == AlertLevel::Red;

  for (const auto& c : directory) {
    if (c.role != ContactRole::Family) continue;
    plan.entries.push_back({c.contact_id, c.role, Channel::Sms});
    if (c.has_app) plan.entries.push_back({c.contact_id, c.role, Channel::Push});
  }
  if (doctors) {
    for (const auto& c : directory) {
      if (c.role != ContactRole::Doctor) continue;
      plan.entries.push_back({c.contact_id, c.role, Channel::Sms});
      if (c.has_app) plan.entries.push_back({c.contact_id, c.role, Channel::Push});
      if (red) plan.entries.push_back({c.contact_id, c.role, Channel::Call});
    }
  }
  if (red) {
    auto chosen = select_volunteers(elder_location, directory, volunteer_radius);
    if (chosen.empty()) plan.warnings.push_back("no volunteer available within radius");
    for (const auto& v : chosen) plan.entries.push_back({v.contact_id, v.role, Channel::Push});
  }
  if (plan.entries.empty()) plan.warnings.push_back("no recipients for alert " + alert.alert_id);
  return plan;
}

std::string record_id_for(std::string_view alert_id, std::string_view recipient,
                          Channel channel) {
  std::string id(alert_id);
  id += '/';
  id += recipient;
  id += '/';
  id += to_string(channel);
  return id;
}

std::string notification_content(const Alert& alert) {
  nlohmann::ordered_json j;
  j["alert_id"] = alert.alert_id;
  j["elder_id"] = alert.elder_id;
  j["level"] = std::string(to_string(alert.level));
  j["source"] = std::string(to_string(alert.source));
  j["created_at"] = alert.created_at;
  j["location"] = alert.location;
  j["risk_detail"] = alert.risk_detail.sections;
  return j.dump();
}

std::vector<NotificationRecord> dispatch(const Alert& alert, const NotificationPlan& plan,
                                         const ChannelHandle& channels, Millis now) {
  const std::string digest = fnv1a_hex(notification_content(alert));
  std::vector<NotificationRecord> out;
  out.reserve(plan.entries.size());
  for (const auto& e : plan.entries) {
    NotificationRecord r;
    r.record_id = record_id_for(alert.alert_id, e.recipient, e.channel);
    r.alert_id = alert.alert_id;
    r.recipient = e.recipient;
    r.channel = e.channel;
    r.content_digest = digest;
    r.sent_at = now;
    r.status_updated_at = now;
    if (!channels.is_open(e.channel)) {
      r.status = DeliveryStatus::Failed;
    } else {
      r.status = e.channel == Channel::Call ? DeliveryStatus::Ringing : DeliveryStatus::Pending;
    }
    out.push_back(std::move(r));
  }
  return out;
}

bool transition_allowed(Channel channel, DeliveryStatus from, DeliveryStatus to) {
  using S = DeliveryStatus;
  if (channel == Channel::Call) {
    return from == S::Ringing && (to == S::Answered || to == S::Voicemail || to == S::Failed);
  }
  if (from == S::Pending) return to == S::Delivered || to == S::Failed;
  if (from == S::Delivered) return to == S::Read;
  return false;
}

NotificationRecord update_status(const NotificationRecord& record, const Receipt& receipt) {
  if (!transition_allowed(record.channel, record.status, receipt.status)) {
    throw TransitionError("illegal " + std::string(to_string(record.channel)) + " transition " +
                          std::string(to_string(record.status)) + " -> " +
                          std::string(to_string(receipt.status)) + " for " + record.record_id);
  }
  NotificationRecord out = record;
  out.status = receipt.status;
  out.status_updated_at = receipt.at;
  return out;
}

std::string audit_line(const NotificationRecord& r) {
  nlohmann::ordered_json j;
  j["record_id"] = r.record_id;
  j["alert_id"] = r.alert_id;
  j["recipient"] = r.recipient;
  j["channel"] = std::string(to_string(r.channel));
  j["status"] = std::string(to_string(r.status));
  j["sent_at"] = r.sent_at;
  j["status_updated_at"] = r.status_updated_at;
  j["content_digest"] = r.content_digest;
  return j.dump();
}

void NotificationStore::add(const NotificationRecord& record) {
  std::lock_guard lock(mu_);
  auto [it, inserted] = records_.emplace(record.record_id, record);
  if (!inserted) throw std::invalid_argument("duplicate notification record " + record.record_id);
  order_.push_back(record.record_id);
  audit_.push_back(audit_line(record));
}

NotificationRecord NotificationStore::apply(const std::string& record_id, const Receipt& receipt) {
  std::lock_guard lock(mu_);
  auto& rec = records_.at(record_id);
  rec = update_status(rec, receipt);
  audit_.push_back(audit_line(rec));
  return rec;
}

std::optional<NotificationRecord> NotificationStore::find(const std::string& record_id) const {
  std::lock_guard lock(mu_);
  auto it = records_.find(record_id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<NotificationRecord> NotificationStore::records() const {
  std::lock_guard lock(mu_);
  std::vector<NotificationRecord> out;
  out.reserve(order_.size());
  for (const auto& id : order_) out.push_back(records_.at(id));
  return out;
}

std::vector<std::string> NotificationStore::audit_log() const {
  std::lock_guard lock(mu_);
  return audit_;
}

AlertDesk::AlertDesk(std::string elder_id, Millis dedup_window_ms)
    : elder_id_(std::move(elder_id)), dedup_window_ms_(dedup_window_ms) {}

std::string AlertDesk::next_id() {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-A%06zu", ++counter_);
  return elder_id_ + buf;
}

std::optional<Alert> AlertDesk::raise(const RiskAssessment& assessment, std::string location,
                                      Millis now) {
  if (assessment.level == AlertLevel::None) return std::nullopt;
  if (auto it = last_raised_.find(assessment.level);
      it != last_raised_.end() && now - it->second < dedup_window_ms_) {
    ++suppressed_;
    suppression_log_.push_back(std::to_string(now) + " suppressed " +
                               std::string(to_string(assessment.level)) + " repeat within " +
                               std::to_string(dedup_window_ms_) + " ms");
    return std::nullopt;
  }
  last_raised_[assessment.level] = now;
  Alert a;
  a.alert_id = next_id();
  a.elder_id = elder_id_;
  a.created_at = now;
  a.level = assessment.level;
  a.source = AlertSource::Automatic;
  a.risk_detail = assessment.detail;
  a.location = std::move(location);
  return a;
}

Alert AlertDesk::manual_trigger(Millis now) {
  return eldercare::manual_trigger(elder_id_, next_id(), now);
}

Alert manual_trigger(const std::string& elder_id, std::string alert_id, Millis now) {
  Alert a;
  a.alert_id = std::move(alert_id);
  a.elder_id = elder_id;
  a.created_at = now;
  a.level = AlertLevel::Red;
  a.source = AlertSource::Manual;
  a.risk_detail.sections["manual"] = {{"reason", "user-initiated emergency"}};
  return a;
}

}  // namespace eldercare
