// Hash-based navigation. The management route is reachable only with a
// live session; everything else is public.

export type Route =
  | { view: 'catalog' }
  | { view: 'type'; type: string }
  | { view: 'provider'; provider: string }
  | { view: 'manage' }
  | { view: 'login' }
  | { view: 'register' };

export const CATALOG: Route = { view: 'catalog' };

export function parseHash(hash: string): Route {
  const path = hash.replace(/^#\/?/, '');
  const [head, ...rest] = path.split('/');
  const arg = decodeURIComponent(rest.join('/'));
  switch (head) {
    case 'type':
      return arg ? { view: 'type', type: arg } : CATALOG;
    case 'provider':
      return arg ? { view: 'provider', provider: arg } : CATALOG;
    case 'manage':
      return { view: 'manage' };
    case 'login':
      return { view: 'login' };
    case 'register':
      return { view: 'register' };
    default:
      return CATALOG;
  }
}

export function formatHash(route: Route): string {
  switch (route.view) {
    case 'catalog':
      return '#/';
    case 'type':
      return `#/type/${encodeURIComponent(route.type)}`;
    case 'provider':
      return `#/provider/${encodeURIComponent(route.provider)}`;
    default:
      return `#/${route.view}`;
  }
}

/** Anonymous visitors asking for the management view land on the login
 * form instead; a logged-in provider asking for the login form is sent
 * to management. */
export function guardRoute(route: Route, loggedIn: boolean): Route {
  if (route.view === 'manage' && !loggedIn) return { view: 'login' };
  if (route.view === 'login' && loggedIn) return { view: 'manage' };
  return route;
}
