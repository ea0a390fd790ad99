// Browser bootstrap: owns the DOM and the address bar, forwards every
// event to the app, and repaints from the HTML the app produces.

import { PortalApi } from './api.js';
import type { RegistrationForm } from './api.js';
import { PortalSession } from './session.js';
import { PortalApp } from './app.js';
import { formatHash } from './router.js';
import type { ServiceDraft } from './validate.js';

const root = document.getElementById('app');
if (!root) throw new Error('missing #app element');

const api = new PortalApi('');
const session = new PortalSession(window.sessionStorage);
const app = new PortalApp({
  api,
  session,
  present: (html) => {
    root.innerHTML = html;
  },
});

function syncHash(): void {
  const wanted = formatHash(app.currentRoute);
  if (window.location.hash !== wanted) {
    window.history.replaceState(null, '', wanted);
  }
}

function formValues(form: HTMLFormElement): Record<string, string> {
  const out: Record<string, string> = {};
  new FormData(form).forEach((value, key) => {
    out[key] = typeof value === 'string' ? value : '';
  });
  return out;
}

root.addEventListener('submit', (event) => {
  const form = event.target;
  if (!(form instanceof HTMLFormElement)) return;
  event.preventDefault();
  const values = formValues(form);
  const run = async () => {
    if (form.id === 'login-form') {
      await app.submitLogin(values['login_name'] ?? '', values['password'] ?? '');
    } else if (form.id === 'register-form') {
      await app.submitRegistration(values as unknown as RegistrationForm);
    } else if (form.id === 'service-form') {
      await app.submitService(values as unknown as ServiceDraft);
    }
    syncHash();
  };
  void run();
});

root.addEventListener('click', (event) => {
  const target = event.target;
  if (!(target instanceof HTMLElement)) return;
  const button = target.closest('[data-action]');
  if (!(button instanceof HTMLElement)) return;
  const action = button.dataset['action'];
  const name = button.dataset['name'] ?? '';
  const run = async () => {
    if (action === 'logout') await app.logout();
    else if (action === 'edit') app.startEdit(name);
    else if (action === 'delete') await app.deleteService(name);
    else if (action === 'cancel-edit') app.cancelEdit();
    syncHash();
  };
  void run();
});

window.addEventListener('hashchange', () => {
  if (window.location.hash === formatHash(app.currentRoute)) return;
  void app.handleHashChange(window.location.hash).then(syncHash);
});

void app.start(window.location.hash).then(syncHash);
